#pragma once

// Command-line front end. `dispatch` is the whole program minus main(): it
// parses arguments, runs one subcommand against a project file and returns
// the process exit code.
//
//   0 success, 1 usage error, 2 validation/consistency error, 3 I/O or parse
//   error. Failures are written to `err` as "error[<code>]: <message>".

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "metakit/bias.hpp"
#include "metakit/format.hpp"
#include "metakit/medline.hpp"
#include "metakit/pooling.hpp"
#include "metakit/render.hpp"
#include "metakit/review.hpp"
#include "metakit/review_io.hpp"
#include "metakit/risk_of_bias.hpp"

namespace metakit::cli {

inline constexpr const char* kOutDirEnv = "METAKIT_OUT_DIR";

// Exclusive advisory lock held while a command mutates the project.
class ProjectLock {
public:
    explicit ProjectLock(const std::filesystem::path& project) {
        const auto lock_path = project.string() + ".lock";
        fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) throw Error(ErrorCode::io, "cannot create lock file '" + lock_path + "'");
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw Error(ErrorCode::io, "cannot lock '" + lock_path + "'");
        }
    }
    ~ProjectLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    ProjectLock(const ProjectLock&) = delete;
    ProjectLock& operator=(const ProjectLock&) = delete;

private:
    int fd_ = -1;
};

struct Options {
    std::string project = "review.json";
    std::string out_dir;

    std::string title;
    bool force = false;

    std::string study_id;
    std::string source = "published";
    std::optional<int> year;

    std::string medline_file;

    std::int64_t e1 = 0, n1 = 0, e2 = 0, n2 = 0;

    std::optional<std::string> comparison;
    std::optional<std::string> outcome;
    std::optional<std::string> outcome_name;
    std::optional<std::string> group1, group2, left_label, right_label;
    std::optional<std::string> method, model, measure, totals, q_source;
    std::optional<double> ci;

    bool trim_fill = false;
    std::string side = "right";

    std::optional<std::int64_t> identified_db, identified_other, after_dedup, screened, excluded_screening,
        fulltext_assessed, qualitative, quantitative;
    std::vector<std::string> reasons;

    std::optional<std::string> scheme;
    std::vector<std::string> deactivate, activate, move_up, move_down;

    std::string domain_id;
    std::string level;
    std::string support;
};

namespace detail {

inline std::optional<Method> method_flag(const std::string& s) {
    if (s == "mh") return Method::mantel_haenszel;
    if (s == "iv") return Method::inverse_variance;
    if (s == "peto") return Method::peto;
    return parse_method(s);
}

inline std::optional<Measure> measure_flag(const std::string& s) {
    if (s == "or") return Measure::odds_ratio;
    if (s == "rr") return Measure::risk_ratio;
    if (s == "rd") return Measure::risk_difference;
    return parse_measure(s);
}

template <typename T>
T require_flag(std::optional<T> v, const std::string& flag, const std::string& given) {
    if (!v) throw Error(ErrorCode::usage, "invalid value '" + given + "' for " + flag);
    return *v;
}

inline AnalysisSettings apply_overrides(AnalysisSettings s, const Options& o) {
    if (o.method) s.method = require_flag(method_flag(*o.method), "--method", *o.method);
    if (o.model) s.model = require_flag(parse_model(*o.model), "--model", *o.model);
    if (o.measure) s.measure = require_flag(measure_flag(*o.measure), "--measure", *o.measure);
    if (o.totals) s.totals = require_flag(parse_totals(*o.totals), "--totals", *o.totals);
    if (o.ci) s.ci_level = *o.ci;
    validate(s);
    return s;
}

inline std::optional<QSource> q_source_flag(const Options& o) {
    if (!o.q_source) return std::nullopt;
    if (*o.q_source == "mh") return QSource::mantel_haenszel;
    if (*o.q_source == "iv") return QSource::inverse_variance;
    throw Error(ErrorCode::usage, "invalid value '" + *o.q_source + "' for --q-source");
}

inline Review load_project(const Options& o, std::ostream& err) {
    auto res = load(o.project);
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
    return std::move(res.review);
}

inline void store_project(Review& r, const Options& o) {
    r.modified = now_utc();
    if (r.modified < r.created) r.modified = r.created;
    save(r, o.project);
}

// Picks the outcome named by --comparison/--outcome, or the only one.
inline Outcome* select_outcome(Review& r, const Options& o, bool create) {
    Comparison* comp = nullptr;
    if (o.comparison) {
        comp = find_comparison(r, *o.comparison);
        if (!comp && create) {
            r.comparisons.push_back({*o.comparison, {}});
            comp = &r.comparisons.back();
        }
        if (!comp) throw Error(ErrorCode::not_found, "unknown comparison '" + *o.comparison + "'");
    } else if (r.comparisons.size() == 1) {
        comp = &r.comparisons.front();
    } else if (r.comparisons.empty()) {
        if (!create) return nullptr;
        r.comparisons.push_back({"Comparison 1", {}});
        comp = &r.comparisons.back();
    } else {
        throw Error(ErrorCode::usage, "review has several comparisons; pass --comparison");
    }

    if (o.outcome) {
        Outcome* out = find_outcome(*comp, *o.outcome);
        if (!out && create) {
            Outcome fresh;
            fresh.name = *o.outcome;
            comp->outcomes.push_back(std::move(fresh));
            out = &comp->outcomes.back();
        }
        if (!out) throw Error(ErrorCode::not_found, "unknown outcome '" + *o.outcome + "'");
        return out;
    }
    if (comp->outcomes.size() == 1) return &comp->outcomes.front();
    if (comp->outcomes.empty()) {
        if (!create) return nullptr;
        Outcome fresh;
        fresh.name = "Outcome 1";
        comp->outcomes.push_back(std::move(fresh));
        return &comp->outcomes.back();
    }
    throw Error(ErrorCode::usage, "comparison '" + comp->name + "' has several outcomes; pass --outcome");
}

inline std::filesystem::path out_dir(const Options& o) {
    std::filesystem::path dir = o.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        dir = env && *env ? env : ".";
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + dir.string() + "'");
    return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& content, std::ostream& out) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io, "cannot write '" + p.string() + "'");
    f << content;
    if (!f.flush()) throw Error(ErrorCode::io, "write failed for '" + p.string() + "'");
    out << "wrote " << p.string() << "\n";
}

inline std::optional<int> year_from_id(const std::string& id) {
    std::optional<int> found;
    for (std::size_t i = 0; i + 4 <= id.size(); ++i) {
        bool digits = true;
        for (std::size_t k = 0; k < 4; ++k) digits = digits && std::isdigit(static_cast<unsigned char>(id[i + k]));
        const bool left_ok = i == 0 || !std::isdigit(static_cast<unsigned char>(id[i - 1]));
        const bool right_ok = i + 4 == id.size() || !std::isdigit(static_cast<unsigned char>(id[i + 4]));
        if (digits && left_ok && right_ok) found = std::stoi(id.substr(i, 4));
    }
    return found;
}

inline std::string pad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

inline std::string settings_line(const AnalysisSettings& s) {
    static const char* methods[] = {"Mantel-Haenszel", "Inverse Variance", "Peto"};
    static const char* measures[] = {"Odds Ratio", "Risk Ratio", "Risk Difference"};
    return std::string(methods[static_cast<int>(s.method)]) + ", " +
           (s.model == Model::fixed ? "Fixed Effect" : "Random Effects") + ", " +
           measures[static_cast<int>(s.measure)] + ", " + round_half_up(s.ci_level * 100.0, 0) + "% CI";
}

inline void print_analysis(const PooledResult& r, const Outcome& o, std::ostream& out) {
    const std::string abbr(abbreviation(r.settings.measure));
    const std::string ci_pct = round_half_up(r.settings.ci_level * 100.0, 0);
    out << "Outcome: " << o.name << "\n";
    out << "Method: " << settings_line(r.settings) << "\n";
    out << pad("Study", 24) << pad(o.group_labels.first, 12) << pad(o.group_labels.second, 12) << pad("Weight", 9)
        << abbr << " [" << ci_pct << "% CI]\n";
    for (const auto& s : r.per_study) {
        std::string g1, g2;
        if (s.table) {
            g1 = std::to_string(s.table->events1) + "/" + std::to_string(s.table->total1);
            g2 = std::to_string(s.table->events2) + "/" + std::to_string(s.table->total2);
        }
        out << pad(s.study_id, 24) << pad(g1, 12) << pad(g2, 12)
            << pad(s.estimate.estimable ? fixed2(s.weight_pct) + "%" : "", 9) << render::estimate_text(s.estimate)
            << "\n";
    }
    if (r.pooled.estimable) {
        out << "Pooled " << abbr << " = " << fixed2(r.pooled.point) << " [" << fixed2(r.pooled.ci_low) << ", "
            << fixed2(r.pooled.ci_high) << "] (k=" << r.k << ")\n";
    } else {
        out << "Pooled " << abbr << " = Not estimable\n";
    }
    const auto& h = r.heterogeneity;
    out << "Heterogeneity: Chi²=" << fixed2(h.q) << ", df=" << h.df << ", p=" << fixed2(h.p_value)
        << ", I²=" << round_half_up(h.i_squared, 0) << "%";
    if (r.settings.model == Model::random) out << ", Tau²=" << fixed2(h.tau_squared);
    out << "\n";
    if (h.significant()) out << "Note: heterogeneity significant at p < 0.10\n";
    out << render::overall_text(r) << "\n";
}

inline PooledResult run_analysis(Review& r, const Options& o, Outcome*& outcome_out) {
    // Reject bad flag values before looking at the data.
    const auto q_source = q_source_flag(o);
    apply_overrides(AnalysisSettings{}, o);
    Outcome* outcome = select_outcome(r, o, false);
    if (!outcome || outcome->rows.empty()) {
        throw Error(ErrorCode::no_data, "no study data entered; use set-data first");
    }
    outcome_out = outcome;
    const auto settings = apply_overrides(outcome->settings, o);
    const auto tables = outcome->tables();
    return analyze(tables, settings, q_source);
}

} // namespace detail

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"metakit: meta-analysis of dichotomous outcomes with review figures", "metakit"};
    app.require_subcommand(1);
    app.add_option("-p,--project", o.project, "Project file (JSON)")->capture_default_str();
    app.add_option("-o,--out-dir", o.out_dir, std::string("Figure output directory (default: $") + kOutDirEnv + " or .)");

    auto add_outcome_selectors = [&o](CLI::App* c) {
        c->add_option("--comparison", o.comparison, "Comparison name");
        c->add_option("--outcome", o.outcome, "Outcome name");
    };
    auto add_overrides = [&o](CLI::App* c) {
        c->add_option("--method", o.method, "mh | iv | peto");
        c->add_option("--model", o.model, "fixed | random");
        c->add_option("--measure", o.measure, "or | rr | rd");
        c->add_option("--ci", o.ci, "Confidence level, e.g. 0.95");
    };

    auto* cmd_new = app.add_subcommand("new", "Create a review project");
    cmd_new->add_option("title", o.title, "Review title")->required();
    cmd_new->add_flag("--force", o.force, "Overwrite an existing project file");

    auto* cmd_add = app.add_subcommand("add-study", "Add an included study");
    cmd_add->add_option("id", o.study_id, "Study id, e.g. \"Wu 2009\"")->required();
    cmd_add->add_option("--source", o.source, "published | unpublished | both")->capture_default_str();
    cmd_add->add_option("--year", o.year, "Year (default: 4-digit year in the id)");

    auto* cmd_import = app.add_subcommand("import-refs", "Import a MEDLINE export into classification-pending references");
    cmd_import->add_option("file", o.medline_file, "MEDLINE text file")->required();

    auto* cmd_set = app.add_subcommand("set-data", "Enter a study's 2x2 data for an outcome");
    cmd_set->add_option("study", o.study_id)->required();
    cmd_set->add_option("events1", o.e1, "Events in group 1")->required();
    cmd_set->add_option("total1", o.n1, "Total in group 1")->required();
    cmd_set->add_option("events2", o.e2, "Events in group 2")->required();
    cmd_set->add_option("total2", o.n2, "Total in group 2")->required();
    add_outcome_selectors(cmd_set);

    auto* cmd_outcome = app.add_subcommand("outcome", "Create or configure an outcome");
    add_outcome_selectors(cmd_outcome);
    cmd_outcome->add_option("--name", o.outcome_name, "Rename the outcome");
    cmd_outcome->add_option("--group1", o.group1, "Label of group 1 (experimental)");
    cmd_outcome->add_option("--group2", o.group2, "Label of group 2 (control)");
    cmd_outcome->add_option("--left-label", o.left_label, "Left graph label");
    cmd_outcome->add_option("--right-label", o.right_label, "Right graph label");
    cmd_outcome->add_option("--totals", o.totals, "none | totals_only | totals_and_subtotals");
    add_overrides(cmd_outcome);

    auto* cmd_analyze = app.add_subcommand("analyze", "Pool the outcome and print the results");
    add_outcome_selectors(cmd_analyze);
    add_overrides(cmd_analyze);
    cmd_analyze->add_option("--q-source", o.q_source, "Q for random effects: mh | iv");

    auto* cmd_forest = app.add_subcommand("forest", "Write the forest plot SVG");
    add_outcome_selectors(cmd_forest);
    add_overrides(cmd_forest);

    auto* cmd_funnel = app.add_subcommand("funnel", "Write the funnel plot SVG");
    add_outcome_selectors(cmd_funnel);
    add_overrides(cmd_funnel);
    cmd_funnel->add_flag("--trim-fill", o.trim_fill, "Add trim-and-fill imputed studies");
    cmd_funnel->add_option("--side", o.side, "Side trimmed by trim-and-fill: right | left")->capture_default_str();

    auto* cmd_prisma = app.add_subcommand("prisma", "Set PRISMA counts and/or write the flow diagram SVG");
    cmd_prisma->add_option("--identified-db", o.identified_db);
    cmd_prisma->add_option("--identified-other", o.identified_other);
    cmd_prisma->add_option("--after-dedup", o.after_dedup);
    cmd_prisma->add_option("--screened", o.screened);
    cmd_prisma->add_option("--excluded-screening", o.excluded_screening);
    cmd_prisma->add_option("--fulltext-assessed", o.fulltext_assessed);
    cmd_prisma->add_option("--reason", o.reasons, "Full-text exclusion reason as TEXT=N (repeatable)");
    cmd_prisma->add_option("--qualitative", o.qualitative);
    cmd_prisma->add_option("--quantitative", o.quantitative);

    auto* cmd_rob = app.add_subcommand("rob", "Configure bias domains and write the risk-of-bias summary SVG");
    cmd_rob->add_option("--scheme", o.scheme, "Reset domains to cochrane7 | nos6");
    cmd_rob->add_option("--deactivate", o.deactivate, "Hide a domain (judgments are kept)");
    cmd_rob->add_option("--activate", o.activate, "Show a hidden domain");
    cmd_rob->add_option("--move-up", o.move_up, "Move a domain one column left");
    cmd_rob->add_option("--move-down", o.move_down, "Move a domain one column right");

    auto* cmd_judge = app.add_subcommand("judge", "Record a risk-of-bias judgment");
    cmd_judge->add_option("study", o.study_id)->required();
    cmd_judge->add_option("domain", o.domain_id)->required();
    cmd_judge->add_option("level", o.level, "low | unclear | high")->required();
    cmd_judge->add_option("--support", o.support, "Support for judgement");

    auto* cmd_report = app.add_subcommand("report", "Print a text summary of the review");

    std::vector<std::string> argv_store;
    argv_store.push_back("metakit");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << "\n";
        return 1;
    }

    try {
        if (cmd_new->parsed()) {
            if (std::filesystem::exists(o.project) && !o.force) {
                throw Error(ErrorCode::conflict, "project '" + o.project + "' exists; pass --force to overwrite");
            }
            ProjectLock lock(o.project);
            auto r = new_review(o.title);
            save(r, o.project);
            out << "created review \"" << r.title << "\" in " << o.project << "\n";
        } else if (cmd_add->parsed()) {
            ProjectLock lock(o.project);
            auto r = detail::load_project(o, err);
            const auto src = detail::require_flag(parse_data_source(o.source), "--source", o.source);
            const auto year = o.year ? o.year : detail::year_from_id(o.study_id);
            if (!year) throw Error(ErrorCode::usage, "no year in study id; pass --year");
            add_study(r, o.study_id, src, *year);
            detail::store_project(r, o);
            out << "added study " << o.study_id << " (" << *year << "); " << r.studies.size() << (r.studies.size() == 1 ? " study\n" : " studies\n");
        } else if (cmd_import->parsed()) {
            std::ifstream in(o.medline_file, std::ios::binary);
            if (!in) throw Error(ErrorCode::io, "cannot open '" + o.medline_file + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            auto parsed = medline::parse(ss.str());
            auto refs = medline::to_references(parsed.records, &parsed.warnings);
            ProjectLock lock(o.project);
            auto r = detail::load_project(o, err);
            const auto added = medline::import_pending(r, refs, &parsed.warnings);
            for (const auto& w : parsed.warnings) {
                err << "warning: " << (w.line ? "line " + std::to_string(w.line) + ": " : "") << w.message << "\n";
            }
            detail::store_project(r, o);
            out << "references found: " << parsed.records.size() << "; added " << added
                << " to classification pending references (" << r.pending_refs.size() << " total)\n";
        } else if (cmd_set->parsed()) {
            ProjectLock lock(o.project);
            auto r = detail::load_project(o, err);
            if (!r.find_study(o.study_id)) throw Error(ErrorCode::not_found, "unknown study '" + o.study_id + "'");
            Outcome* outcome = detail::select_outcome(r, o, true);
            const TwoByTwoTable t{o.e1, o.n1, o.e2, o.n2};
            set_study_data(r, *outcome, o.study_id, t);
            detail::store_project(r, o);
            out << o.study_id << ": " << outcome->group_labels.first << " " << t.events1 << "/" << t.total1 << ", "
                << outcome->group_labels.second << " " << t.events2 << "/" << t.total2 << "\n";
        } else if (cmd_outcome->parsed()) {
            ProjectLock lock(o.project);
            auto r = detail::load_project(o, err);
            Outcome* outcome = detail::select_outcome(r, o, true);
            if (o.outcome_name) outcome->name = *o.outcome_name;
            if (o.group1) outcome->group_labels.first = *o.group1;
            if (o.group2) outcome->group_labels.second = *o.group2;
            if (o.left_label) outcome->graph_labels.first = *o.left_label;
            if (o.right_label) outcome->graph_labels.second = *o.right_label;
            outcome->settings = detail::apply_overrides(outcome->settings, o);
            out << "outcome " << outcome->name << ": " << detail::settings_line(outcome->settings) << "; groups "
                << outcome->group_labels.first << " vs " << outcome->group_labels.second << "\n";
            detail::store_project(r, o);
        } else if (cmd_analyze->parsed()) {
            auto r = detail::load_project(o, err);
            Outcome* outcome = nullptr;
            const auto result = detail::run_analysis(r, o, outcome);
            out << "Review: " << r.title << "\n";
            detail::print_analysis(result, *outcome, out);
        } else if (cmd_forest->parsed()) {
            auto r = detail::load_project(o, err);
            Outcome* outcome = nullptr;
            const auto result = detail::run_analysis(r, o, outcome);
            detail::write_file(detail::out_dir(o) / render::figure_filename(r, "forest"),
                               render::render_forest(result, *outcome), out);
        } else if (cmd_funnel->parsed()) {
            auto r = detail::load_project(o, err);
            Outcome* outcome = nullptr;
            const auto result = detail::run_analysis(r, o, outcome);
            FunnelData f = funnel_data(result);
            if (f.points.empty()) throw Error(ErrorCode::no_data, "no estimable studies for the funnel plot");
            if (o.trim_fill) {
                TrimFillOptions tf;
                tf.ci_level = result.settings.ci_level;
                tf.model = result.settings.model;
                if (o.side == "left") {
                    tf.side = TrimSide::left;
                } else if (o.side != "right") {
                    throw Error(ErrorCode::usage, "invalid value '" + o.side + "' for --side");
                }
                std::vector<StudyEstimate> est;
                for (const auto& s : result.per_study) est.push_back({s.study_id, s.estimate});
                const auto tfr = trim_and_fill(est, tf);
                f = funnel_data(result, tfr);
                out << "trim-and-fill: imputed " << tfr.imputed_count << " stud" << (tfr.imputed_count == 1 ? "y" : "ies");
                if (tfr.adjusted.pooled.estimable) {
                    out << "; adjusted " << abbreviation(result.settings.measure) << " = "
                        << render::estimate_text(tfr.adjusted.pooled);
                }
                out << "\n";
            }
            detail::write_file(detail::out_dir(o) / render::figure_filename(r, "funnel"), render::render_funnel(f), out);
        } else if (cmd_prisma->parsed()) {
            ProjectLock lock(o.project);
            auto r = detail::load_project(o, err);
            FlowDiagram f = r.flow.value_or(FlowDiagram{});
            bool changed = false;
            auto set = [&changed](std::int64_t& field, const std::optional<std::int64_t>& v) {
                if (v) {
                    field = *v;
                    changed = true;
                }
            };
            set(f.identified_db, o.identified_db);
            set(f.identified_other, o.identified_other);
            set(f.after_dedup, o.after_dedup);
            set(f.screened, o.screened);
            set(f.excluded_screening, o.excluded_screening);
            set(f.fulltext_assessed, o.fulltext_assessed);
            set(f.qualitative_included, o.qualitative);
            set(f.quantitative_included, o.quantitative);
            if (!o.reasons.empty()) {
                f.fulltext_excluded.clear();
                for (const auto& spec : o.reasons) {
                    const auto eq = spec.rfind('=');
                    if (eq == std::string::npos || eq == 0) {
                        throw Error(ErrorCode::usage, "--reason expects TEXT=N, got '" + spec + "'");
                    }
                    std::int64_t n = 0;
                    try {
                        n = std::stoll(spec.substr(eq + 1));
                    } catch (const std::exception&) {
                        throw Error(ErrorCode::usage, "--reason expects TEXT=N, got '" + spec + "'");
                    }
                    f.fulltext_excluded.push_back({spec.substr(0, eq), n});
                }
                changed = true;
            }
            if (!changed && !r.flow) throw Error(ErrorCode::no_data, "no PRISMA counts recorded; pass the count flags");
            r.flow = build_flow(f);
            if (changed) detail::store_project(r, o);
            detail::write_file(detail::out_dir(o) / render::figure_filename(r, "prisma"), render::render_prisma(*r.flow), out);
        } else if (cmd_rob->parsed()) {
            ProjectLock lock(o.project);
            auto r = detail::load_project(o, err);
            bool changed = false;
            if (o.scheme) {
                use_scheme(r, detail::require_flag(parse_scheme(*o.scheme), "--scheme", *o.scheme));
                changed = true;
            }
            for (const auto& id : o.deactivate) deactivate_domain(r, id), changed = true;
            for (const auto& id : o.activate) activate_domain(r, id), changed = true;
            for (const auto& id : o.move_up) move_domain(r, id, MoveDirection::up), changed = true;
            for (const auto& id : o.move_down) move_domain(r, id, MoveDirection::down), changed = true;
            if (changed) detail::store_project(r, o);
            const auto m = summary_matrix(r);
            detail::write_file(detail::out_dir(o) / render::figure_filename(r, "rob"), render::render_rob(m), out);
        } else if (cmd_judge->parsed()) {
            ProjectLock lock(o.project);
            auto r = detail::load_project(o, err);
            const auto level = detail::require_flag(parse_judgment_level(o.level), "level", o.level);
            set_judgment(r, o.study_id, o.domain_id, level, o.support);
            detail::store_project(r, o);
            out << o.study_id << " / " << o.domain_id << ": " << to_string(level) << "\n";
        } else if (cmd_report->parsed()) {
            auto r = detail::load_project(o, err);
            out << "Review: " << r.title << "\n";
            out << "Created: " << format_timestamp(r.created) << ", modified: " << format_timestamp(r.modified) << "\n";
            out << "Studies: " << r.studies.size() << "\n";
            out << "References: " << r.included_refs.size() << " included, " << r.pending_refs.size()
                << " classification pending\n";
            if (r.flow) {
                out << "PRISMA: identified " << r.flow->identified() << ", screened " << r.flow->screened
                    << ", full-text assessed " << r.flow->fulltext_assessed << ", qualitative "
                    << r.flow->qualitative_included << ", quantitative " << r.flow->quantitative_included << "\n";
            }
            const auto m = summary_matrix(r);
            if (m.cols() > 0) {
                int counts[3] = {0, 0, 0};
                int blank = 0;
                for (const auto& row : m.cells) {
                    for (const auto& c : row) {
                        if (c) ++counts[static_cast<int>(c->level)];
                        else ++blank;
                    }
                }
                out << "Risk of bias: " << m.cols() << " domains; low " << counts[0] << ", unclear " << counts[1]
                    << ", high " << counts[2] << ", blank " << blank << "\n";
            }
            for (const auto& c : r.comparisons) {
                for (const auto& oc : c.outcomes) {
                    out << "\nComparison: " << c.name << "\n";
                    if (oc.rows.empty()) {
                        out << "Outcome: " << oc.name << " (no data)\n";
                        continue;
                    }
                    const auto tables = oc.tables();
                    detail::print_analysis(analyze(tables, oc.settings), oc, out);
                }
            }
        }
    } catch (const Error& e) {
        err << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "error[io]: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace metakit::cli
