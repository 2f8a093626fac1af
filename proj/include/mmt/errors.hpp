#ifndef MMT_ERRORS_HPP
#define MMT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmt {

// Exit codes used by the CLI: 0 success, 1 usage, 2 data, 3 backend.
enum class ExitCode : int { ok = 0, usage = 1, data = 2, backend = 3 };

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad invocation: unknown flags, missing arguments, malformed config.
struct UsageError : Error {
    using Error::Error;
};

// Problems with the data itself: unreadable files, format violations,
// integrity mismatches, stage-dependency violations.
struct DataError : Error {
    using Error::Error;
};

// A pluggable backend (embedder, reducer, LLM transport) is missing,
// misconfigured or failed.
struct BackendError : Error {
    using Error::Error;
};

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return static_cast<int>(ExitCode::usage);
    if (dynamic_cast<const BackendError*>(&e)) return static_cast<int>(ExitCode::backend);
    if (dynamic_cast<const DataError*>(&e)) return static_cast<int>(ExitCode::data);
    return static_cast<int>(ExitCode::data);
}

}  // namespace mmt

#endif
