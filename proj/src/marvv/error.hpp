#pragma once

#include <stdexcept>
#include <string>

namespace marvv {

// Mirrors marvv_status in the C API; keep the numeric values in sync.
enum class ErrorCode {
    invalid_argument = 1,
    io = 2,
    parse = 3,
    validation = 4,
    dimension_mismatch = 5,
    out_of_bounds = 6,
    numerical = 7,
    grounding = 8,
    internal = 9,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) {
        throw Error(code, what);
    }
}

}  // namespace marvv
