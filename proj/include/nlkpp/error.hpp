#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlkpp {

enum class ErrorKind {
    invalid_kernel,
    domain,
    assumption_violation,
    insufficient_horizon,
    unsupported,
    no_minorant,
    resolution,
    stability,
    domain_exhausted,
    invalid_parameters,
    insufficient_data,
    invalid_input,
    numerical,
    io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace nlkpp
