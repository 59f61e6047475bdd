#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metakit {

enum class ErrorCode {
    usage,
    validation,
    conflict,
    not_found,
    consistency,
    no_data,
    parse,
    version,
    io,
    non_convergence,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::validation: return "validation";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::consistency: return "consistency";
    case ErrorCode::no_data: return "no-data";
    case ErrorCode::parse: return "parse";
    case ErrorCode::version: return "version";
    case ErrorCode::io: return "io";
    case ErrorCode::non_convergence: return "non-convergence";
    }
    return "unknown";
}

// Process exit status for a failure of the given kind.
// 1 = usage, 2 = validation/consistency, 3 = I/O or parse.
inline int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::usage: return 1;
    case ErrorCode::parse:
    case ErrorCode::version:
    case ErrorCode::io: return 3;
    default: return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace metakit
