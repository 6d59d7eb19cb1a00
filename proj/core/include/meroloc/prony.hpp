#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "meroloc/contour.hpp"
#include "meroloc/linalg.hpp"

namespace meroloc {

/// zeta-space roots recovered from one moment vector.
struct PronyResult {
    std::vector<Complex> zetas;
    /// Negative for poles.
    std::vector<int> multiplicities;
    double kappa_sq = 1.0;
    std::vector<double> deltas;
    double r_plus = 0.0;
    double r_minus = 0.0;
    double vandermonde_residual = 0.0;
    /// False when the enlarged pencil did not yield enough finite eigenvalues
    /// and deltas hold the conservative fallback eps_i * kappa_sq.
    bool error_estimate_available = true;
};

/// n x n Hankel matrix with entry (i, j) = G_{i+j+shift}.
linalg::ComplexMatrix hankel(const MomentVector& moments, std::size_t n, int shift);

/// Default absolute rank threshold for a K x K Hankel matrix: 10 eps sqrt(K),
/// eps being the larger of the requested and achieved quadrature errors.
double rank_tolerance(const MomentVector& moments, std::size_t k);

/// Smallest N with rank(H0 of size N+1) = rank(H0 of size N+2) = N, using
/// singular values above max(rank_tol, 1e-13 sigma_max). Without rank_tol the
/// per-size default is used. Returns n_max + 1 when no such N <= n_max exists
/// or the moments run out first.
std::size_t count_roots(const MomentVector& moments, std::size_t n_max,
                        std::optional<double> rank_tol = std::nullopt);

/// The N finite eigenvalues of H1 x = lambda H0 x (size N). Throws
/// DegeneratePencil when fewer than N are finite.
std::vector<Complex> solve_pencil(const MomentVector& moments, std::size_t n);

/// Upper bound on the squared eigenvalue condition number:
///   N^2 (r+/r-)^{2(N-1)} (1 + r+)^{2(N-1)} max_i prod_{j != i} |e^{i th_i} - e^{i th_j}|^{-2}.
/// Infinite when two roots coincide within 1e-14 or share an angle.
double estimate_condition(std::span<const Complex> zetas);

struct ErrorEstimate {
    std::vector<double> deltas;
    bool available = true;
};

/// delta_i = |zeta_i - zeta_i'| / 2 where zeta_i' is the greedily matched
/// eigenvalue of the pencil enlarged by one. Falls back to eps_i * kappa_sq
/// when that pencil has fewer than N finite eigenvalues.
ErrorEstimate estimate_errors(const MomentVector& moments, std::size_t n, std::span<const Complex> zetas);

struct MultiplicityFit {
    std::vector<int> values;
    std::vector<Complex> weights;
    double residual = 0.0;
};

/// Least-squares weights from the first max(2N, 4) moments rounded to nonzero
/// integers. Throws MultiplicityInconsistency if a weight is more than 0.25
/// from an integer (real or imaginary part), rounds to zero, or the sum
/// differs from W.
MultiplicityFit multiplicities(const MomentVector& moments, std::span<const Complex> zetas);

/// solve_pencil, estimate_condition, estimate_errors and multiplicities in
/// sequence.
PronyResult analyse(const MomentVector& moments, std::size_t n);

}  // namespace meroloc
