#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace screening {

enum class ErrorCode {
    InvalidArgument,
    InvalidFrontier,
    NonUniquePeak,
    SentinelArithmetic,
    EmptyDistribution,
    ConditioningOnNull,
    AtomAtZero,
    NotSimple,
    BracketFailure,
    NothingToImprove,
    BudgetExceeded,
    SolverFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a code so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace screening
