#pragma once

#include <stdexcept>
#include <string>

namespace fluxladder {

// Error categories; the C API maps these 1:1 onto fl_status codes.
enum class ErrorCode {
    invalid_argument,
    dimension_mismatch,
    non_measurable_pair,
    config,
    io,
    numeric,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
    throw Error(ErrorCode::invalid_argument, msg);
}
[[noreturn]] inline void throw_mismatch(const std::string& msg) {
    throw Error(ErrorCode::dimension_mismatch, msg);
}
[[noreturn]] inline void throw_non_measurable(const std::string& msg) {
    throw Error(ErrorCode::non_measurable_pair, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
    throw Error(ErrorCode::config, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
    throw Error(ErrorCode::io, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
    throw Error(ErrorCode::numeric, msg);
}

}  // namespace fluxladder
