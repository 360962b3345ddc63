#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankone {

enum class ErrorKind {
    StageOutOfRange,
    SizeLimitExceeded,
    InvalidModulus,
    InvalidSpec,
    UndeclaredDivergence,
    TruncatedComparison,
    IncoherentPoint,
    ModulusNotInK,
    EmptySet,
    CriterionUnmetAtDepth,
    ProbeNotInK,
    BudgetExhausted,
    SummabilityUndeclared,
    NotSummable,
    CuttingTooSmall,
    IdentityViolation,
    ConfigInvalid,
    IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace rankone
