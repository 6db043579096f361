#include "fmdp/error.hpp"

namespace fmdp {

std::string_view error_name(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::EmptyActionSet: return "EmptyActionSet";
    case ErrorKind::PmfNotNormalized: return "PmfNotNormalized";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorKind::UnknownSuccessorState: return "UnknownSuccessorState";
    case ErrorKind::DuplicateActionId: return "DuplicateActionId";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::PolicySpaceTooLarge: return "PolicySpaceTooLarge";
    case ErrorKind::InvalidPolicy: return "InvalidPolicy";
    case ErrorKind::ActionNotValid: return "ActionNotValid";
    case ErrorKind::NoConvergenceGuarantee: return "NoConvergenceGuarantee";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SpectralRadiusNotBounded: return "SpectralRadiusNotBounded";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::GammaNotContractive: return "GammaNotContractive";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

namespace {

std::string summarize(const std::vector<Violation>& violations) {
    std::string out = std::to_string(violations.size()) + " violation(s)";
    for (const auto& v : violations)
        out += "; " + v.message;
    return out;
}

ErrorKind first_kind(const std::vector<Violation>& violations) {
    return violations.empty() ? ErrorKind::InvalidArgument : violations.front().kind;
}

} // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(first_kind(violations), summarize(violations)), violations_(std::move(violations)) {}

} // namespace fmdp
