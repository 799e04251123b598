#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jjgz {

enum class ErrorKind {
    configuration,  // bad or contradictory user input
    ingestion,      // malformed waveform table
    domain,         // argument outside an operation's domain
    contract,       // caller broke a precondition between modules
    numerical,      // solver or integrator failure
    regime,         // physics outside the model's validity (no instability, zero gain)
};

/// Every error raised by the library. Carries the module that raised it and a
/// short remedy hint that the command line tool prints next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& what, std::string hint = {})
        : std::runtime_error(what), kind_(kind), module_(std::move(module)), hint_(std::move(hint)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }
    const std::string& hint() const noexcept { return hint_; }

private:
    ErrorKind kind_;
    std::string module_;
    std::string hint_;
};

/// Raised by the tridiagonal solver when a pivot vanishes.
class SingularSystemError : public Error {
public:
    SingularSystemError(std::size_t pivot_index, const std::string& what)
        : Error(ErrorKind::numerical, "bvp", what, "perturb the number of grid steps by one and retry"),
          pivot_index_(pivot_index) {}

    std::size_t pivot_index() const noexcept { return pivot_index_; }

private:
    std::size_t pivot_index_;
};

/// Process exit code for an error kind: 2 for configuration-type errors,
/// 3 for numerical or regime failures.
inline int exit_code(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::configuration:
    case ErrorKind::ingestion:
    case ErrorKind::contract:
        return 2;
    case ErrorKind::domain:
    case ErrorKind::numerical:
    case ErrorKind::regime:
        return 3;
    }
    return 3;
}

const char* to_string(ErrorKind kind) noexcept;

} // namespace jjgz
