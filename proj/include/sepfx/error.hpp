#pragma once

#include <stdexcept>
#include <string>

namespace sepfx {

enum class ErrorCode {
    invalid_model,
    invalid_argument,
    unknown_column,
    positivity,
    truncated_outcome,
    undefined_due_to_truncation,
    missing_role,
    empty_stratum,
    enumeration_limit,
    calibration,
    parse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sepfx
