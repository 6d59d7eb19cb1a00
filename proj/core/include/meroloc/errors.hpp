#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meroloc {

/// Failure categories raised by the library. The driver dispatches on these
/// to decide between subdividing, jittering, and giving up.
enum class ErrorKind {
    InvalidInput,
    Convergence,
    DegenerateSystem,
    Overflow,
    BranchCut,
    Evaluation,
    BoundaryProximity,
    InconsistentTrace,
    ToleranceNotMet,
    DegeneratePencil,
    MultiplicityInconsistency,
    BoundaryRoot,
    PartialResult,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by moment evaluation when the evaluation budget runs out before
/// every moment reaches the requested tolerance.
class ToleranceNotMetError : public Error {
public:
    ToleranceNotMetError(const std::string& message, double achieved)
        : Error(ErrorKind::ToleranceNotMet, message), achieved_(achieved) {}

    [[nodiscard]] double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace meroloc
