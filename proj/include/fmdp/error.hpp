#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fmdp {

enum class ErrorKind {
    EmptyActionSet,
    PmfNotNormalized,
    NegativeProbability,
    GammaOutOfRange,
    UnknownSuccessorState,
    DuplicateActionId,
    NonFiniteValue,
    PolicySpaceTooLarge,
    InvalidPolicy,
    ActionNotValid,
    NoConvergenceGuarantee,
    DimensionMismatch,
    SpectralRadiusNotBounded,
    ResidualTooLarge,
    IterationCapExceeded,
    SingularMatrix,
    GammaNotContractive,
    InvalidArgument,
    ParseError,
};

/// Stable identifier used in diagnostics and on the CLI.
std::string_view error_name(ErrorKind kind) noexcept;

/**
 * Base exception for every failure raised by the library. The kind is the
 * machine-readable part; what() carries the human-readable detail.
 */
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// One problem found while validating a candidate model.
struct Violation {
    ErrorKind kind;
    std::string message;
};

/// Raised by validate_mdp with every violation found, not only the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

} // namespace fmdp
