#include "meroloc/errors.hpp"

namespace meroloc {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::DegenerateSystem: return "degenerate-system";
        case ErrorKind::Overflow: return "overflow";
        case ErrorKind::BranchCut: return "branch-cut";
        case ErrorKind::Evaluation: return "evaluation";
        case ErrorKind::BoundaryProximity: return "boundary-proximity";
        case ErrorKind::InconsistentTrace: return "inconsistent-trace";
        case ErrorKind::ToleranceNotMet: return "tolerance-not-met";
        case ErrorKind::DegeneratePencil: return "degenerate-pencil";
        case ErrorKind::MultiplicityInconsistency: return "multiplicity-inconsistency";
        case ErrorKind::BoundaryRoot: return "boundary-root";
        case ErrorKind::PartialResult: return "partial-result";
    }
    return "unknown";
}

}  // namespace meroloc
