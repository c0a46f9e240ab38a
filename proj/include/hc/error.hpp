#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hc {

enum class ErrorCode {
    DimensionMismatch,
    InvalidArgument,
    Numerical,
    Config,
    Io,
    Format,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable category. The CLI prints
/// `error: <category>: <message>` on a single line.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) {
        throw Error(code, message);
    }
}

} // namespace hc
