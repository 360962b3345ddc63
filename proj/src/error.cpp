#include "rankone/error.hpp"

namespace rankone {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::StageOutOfRange: return "StageOutOfRange";
        case ErrorKind::SizeLimitExceeded: return "SizeLimitExceeded";
        case ErrorKind::InvalidModulus: return "InvalidModulus";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::UndeclaredDivergence: return "UndeclaredDivergence";
        case ErrorKind::TruncatedComparison: return "TruncatedComparison";
        case ErrorKind::IncoherentPoint: return "IncoherentPoint";
        case ErrorKind::ModulusNotInK: return "ModulusNotInK";
        case ErrorKind::EmptySet: return "EmptySet";
        case ErrorKind::CriterionUnmetAtDepth: return "CriterionUnmetAtDepth";
        case ErrorKind::ProbeNotInK: return "ProbeNotInK";
        case ErrorKind::BudgetExhausted: return "BudgetExhausted";
        case ErrorKind::SummabilityUndeclared: return "SummabilityUndeclared";
        case ErrorKind::NotSummable: return "NotSummable";
        case ErrorKind::CuttingTooSmall: return "CuttingTooSmall";
        case ErrorKind::IdentityViolation: return "IdentityViolation";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace rankone
