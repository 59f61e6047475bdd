#pragma once

// Risk-of-bias domains, per-study judgments and the summary grid.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "metakit/review.hpp"
#include "metakit/rob_types.hpp"

namespace metakit {

namespace detail {

inline BiasDomain& require_domain(Review& r, const std::string& id) {
    auto* d = r.find_domain(id);
    if (!d) throw Error(ErrorCode::not_found, "unknown risk-of-bias domain '" + id + "'");
    return *d;
}

inline std::vector<BiasDomain*> domains_by_order(Review& r) {
    std::vector<BiasDomain*> out;
    for (auto& d : r.rob_domains) out.push_back(&d);
    std::stable_sort(out.begin(), out.end(), [](const BiasDomain* a, const BiasDomain* b) { return a->order < b->order; });
    return out;
}

} // namespace detail

// Replaces the review's domain list with a predefined scheme. Stored
// judgments are kept; they reappear if a domain with the same id returns.
inline void use_scheme(Review& r, DomainScheme scheme) {
    r.rob_domains = default_domains(scheme);
}

inline BiasDomain& add_domain(Review& r, std::string id, std::string question) {
    if (id.empty()) throw Error(ErrorCode::validation, "domain id must not be empty");
    if (r.find_domain(id)) throw Error(ErrorCode::conflict, "domain '" + id + "' already exists");
    int next = 0;
    for (const auto& d : r.rob_domains) next = std::max(next, d.order + 1);
    r.rob_domains.push_back({std::move(id), std::move(question), true, next});
    return r.rob_domains.back();
}

inline void set_judgment(Review& r, const std::string& study_id, const std::string& domain_id, JudgmentLevel level,
                         std::string support = {}) {
    auto* s = r.find_study(study_id);
    if (!s) throw Error(ErrorCode::not_found, "unknown study '" + study_id + "'");
    detail::require_domain(r, domain_id);
    s->rob_judgments[domain_id] = Judgment{level, std::move(support)};
}

inline void deactivate_domain(Review& r, const std::string& domain_id) {
    detail::require_domain(r, domain_id).active = false;
}

inline void activate_domain(Review& r, const std::string& domain_id) {
    detail::require_domain(r, domain_id).active = true;
}

enum class MoveDirection { up, down };

// Swaps the domain's position with its neighbour; a no-op at either end.
inline void move_domain(Review& r, const std::string& domain_id, MoveDirection dir) {
    auto& target = detail::require_domain(r, domain_id);
    auto sorted = detail::domains_by_order(r);
    auto it = std::find(sorted.begin(), sorted.end(), &target);
    const auto pos = static_cast<std::size_t>(it - sorted.begin());
    if (dir == MoveDirection::up && pos == 0) return;
    if (dir == MoveDirection::down && pos + 1 >= sorted.size()) return;
    BiasDomain* other = dir == MoveDirection::up ? sorted[pos - 1] : sorted[pos + 1];
    std::swap(target.order, other->order);
}

struct RobMatrix {
    std::vector<std::string> study_ids;  // rows, sorted by id
    std::vector<BiasDomain> domains;     // active columns, by order
    std::vector<std::vector<std::optional<Judgment>>> cells;

    std::size_t rows() const { return study_ids.size(); }
    std::size_t cols() const { return domains.size(); }
};

inline RobMatrix summary_matrix(const Review& r) {
    RobMatrix m;
    for (const auto& s : r.studies) m.study_ids.push_back(s.id);
    std::sort(m.study_ids.begin(), m.study_ids.end());
    for (const auto& d : r.rob_domains) {
        if (d.active) m.domains.push_back(d);
    }
    std::stable_sort(m.domains.begin(), m.domains.end(),
                     [](const BiasDomain& a, const BiasDomain& b) { return a.order < b.order; });
    for (const auto& id : m.study_ids) {
        const Study* s = r.find_study(id);
        std::vector<std::optional<Judgment>> row;
        for (const auto& d : m.domains) {
            auto it = s->rob_judgments.find(d.id);
            row.push_back(it == s->rob_judgments.end() ? std::nullopt : std::optional<Judgment>(it->second));
        }
        m.cells.push_back(std::move(row));
    }
    return m;
}

} // namespace metakit
