#include "screening/errors.hpp"

namespace screening {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidFrontier: return "InvalidFrontier";
        case ErrorCode::NonUniquePeak: return "NonUniquePeak";
        case ErrorCode::SentinelArithmetic: return "SentinelArithmetic";
        case ErrorCode::EmptyDistribution: return "EmptyDistribution";
        case ErrorCode::ConditioningOnNull: return "ConditioningOnNull";
        case ErrorCode::AtomAtZero: return "AtomAtZero";
        case ErrorCode::NotSimple: return "NotSimple";
        case ErrorCode::BracketFailure: return "BracketFailure";
        case ErrorCode::NothingToImprove: return "NothingToImprove";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::SolverFailure: return "SolverFailure";
    }
    return "Unknown";
}

}  // namespace screening
