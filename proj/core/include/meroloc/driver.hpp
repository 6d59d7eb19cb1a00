#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meroloc/contour.hpp"
#include "meroloc/functions.hpp"
#include "meroloc/geometry.hpp"
#include "meroloc/prony.hpp"

namespace meroloc {

struct SearchConfig {
    double kappa_c_sq = 128.0;
    double eps_i = 1.49e-8;
    double eps0 = 0.1;
    std::size_t n_max_region = 16;
    int max_depth = 24;
    double jitter_fraction = 0.007;
    std::uint64_t eval_budget = 200000;
    /// Worker threads processing regions; results do not depend on it.
    unsigned workers = 1;
    /// Absolute rank threshold for count_roots; the per-size default when unset.
    std::optional<double> rank_tol;

    /// Throws InvalidInput unless kappa_c_sq >= 1, 0 < eps0 <= 0.5,
    /// 0 < eps_i < 1e-2 and the counts are positive.
    void validate() const;
};

struct RootReport {
    Complex location;
    int multiplicity = 0;
    double error_estimate = 0.0;
    std::string region_path;
    double kappa_sq = 1.0;
    /// Cluster centroid reported at max_depth without passing every gate.
    bool flagged = false;
};

enum class RegionStatus { Accepted, Empty, Subdivided, Unresolved, BoundaryRoot };

std::string_view to_string(RegionStatus status) noexcept;

/// One node of the subdivision tree.
struct RegionDiagnostics {
    /// "r" for the top level; each subdivision appends "L0"/"L1" (length
    /// halves) or "H0"/"H1" (height halves, lower first).
    std::string path;
    Rectangle rect;
    /// Rectangle actually integrated over (differs from rect after jitter).
    Rectangle work_rect;
    int depth = 0;
    RegionStatus status = RegionStatus::Accepted;
    /// Why the region was subdivided or left unresolved.
    std::string reason;
    /// Winding number measured on work_rect.
    std::optional<int> winding;
    /// Total multiplicity of the reports this region and its descendants
    /// keep. Equals `winding` unless a jittered work rectangle picked up roots
    /// owned by a neighbour.
    int owned_winding = 0;
    std::optional<std::size_t> root_count;
    std::optional<double> kappa_sq;
    std::optional<double> achieved_eps;
    std::uint64_t evaluations = 0;
    int jitter_attempts = 0;
    std::vector<std::string> warnings;
    std::vector<RegionDiagnostics> children;
};

struct SearchResult {
    /// Sorted by (Re, Im, multiplicity).
    std::vector<RootReport> roots;
    RegionDiagnostics tree;
    /// Leaves with status Unresolved or BoundaryRoot, in path order.
    std::vector<const RegionDiagnostics*> unresolved() const;
    [[nodiscard]] bool complete() const { return unresolved().empty(); }
    std::uint64_t evaluations = 0;
};

/// Full search with the subdivision tree; never throws for unresolved regions.
SearchResult locate_detailed(const FunctionHandle& handle, const Rectangle& rect, const SearchConfig& config);

/// Error raised by locate when some regions could not be resolved; carries
/// the complete result.
class PartialResultError : public Error {
public:
    PartialResultError(const std::string& message, SearchResult result, ErrorKind kind = ErrorKind::PartialResult)
        : Error(kind, message), result_(std::move(result)) {}
    [[nodiscard]] const SearchResult& result() const noexcept { return result_; }

private:
    SearchResult result_;
};

/// Roots and poles of handle in rect. Throws PartialResultError (kind
/// PartialResult, or BoundaryRoot when jittering gave up) listing the
/// unresolved regions.
std::vector<RootReport> locate(const FunctionHandle& handle, const Rectangle& rect, const SearchConfig& config);

/// rect grown by jitter_fraction (1 + attempt) min(L, h) on every side.
/// Throws BoundaryRoot for attempt > 3.
Rectangle jitter_retry(const Rectangle& rect, int attempt, const SearchConfig& config);

}  // namespace meroloc
