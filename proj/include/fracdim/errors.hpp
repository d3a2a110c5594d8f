#pragma once

#include <stdexcept>
#include <string>

namespace fracdim {

// Input / file-format problems (CLI exit code 2).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated operation preconditions (CLI exit code 3).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation that requires an EXACT cube cover was handed an OUTER one.
struct ExactnessError : PreconditionError {
    explicit ExactnessError(const std::string& msg) : PreconditionError(msg) {}
};

// Word/space refinement did not terminate within the configured budget.
struct RefinementLimitError : PreconditionError {
    explicit RefinementLimitError(const std::string& msg) : PreconditionError(msg) {}
};

// Scale-scan searches (Frostman constructors) that exhaust their budget.
struct SearchFailureError : PreconditionError {
    explicit SearchFailureError(const std::string& msg) : PreconditionError(msg) {}
};

}  // namespace fracdim
