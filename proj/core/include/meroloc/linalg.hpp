#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "meroloc/errors.hpp"

namespace meroloc::linalg {

using Complex = std::complex<double>;

inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

/// Dense row-major complex matrix. Entries are checked for finiteness on
/// construction.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> diag);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }

    [[nodiscard]] std::span<const Complex> entries() const noexcept { return entries_; }

    /// Max absolute row sum.
    [[nodiscard]] double norm_inf() const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    [[nodiscard]] std::vector<Complex> multiply(std::span<const Complex> x) const;
    [[nodiscard]] ComplexMatrix multiply(const ComplexMatrix& other) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

enum class EigenClass { Finite, Infinite, Indeterminate };

struct GeneralizedEigenvalue {
    Complex alpha;
    Complex beta;
    EigenClass classification = EigenClass::Finite;
    /// Right eigenvector; populated for finite entries only.
    std::vector<Complex> vector;

    [[nodiscard]] Complex value() const { return alpha / beta; }
    [[nodiscard]] bool finite() const noexcept { return classification == EigenClass::Finite; }
};

struct EigOptions {
    /// Relative threshold for infinite/indeterminate classification; scaled
    /// by max(|A|_inf, |B|_inf). Default 1e3 unit roundoffs.
    double beta_tolerance = 1e3 * kUnitRoundoff;
    bool compute_vectors = true;
};

/// QZ failed to converge. The eigenvalues that did converge are kept.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, std::vector<GeneralizedEigenvalue> partial)
        : Error(ErrorKind::Convergence, message), partial_(std::move(partial)) {}

    [[nodiscard]] const std::vector<GeneralizedEigenvalue>& partial() const noexcept {
        return partial_;
    }

private:
    std::vector<GeneralizedEigenvalue> partial_;
};

/// Number of singular values above max(abs_tol, 50 u sigma_max).
std::size_t numerical_rank(const ComplexMatrix& m, double abs_tol);

/// Singular values in decreasing order.
std::vector<double> singular_values(const ComplexMatrix& m);

/// Generalized eigenvalues of the pencil A - lambda B by complex QZ. B may be
/// singular; such directions are reported as infinite or indeterminate.
std::vector<GeneralizedEigenvalue> generalized_eig(const ComplexMatrix& a, const ComplexMatrix& b,
                                                   const EigOptions& options = {});

struct VandermondeSolution {
    std::vector<Complex> weights;
    double residual = 0.0;
};

/// Least-squares weights w minimising |sum_j w_j nodes_j^k - rhs_k|_2 over
/// k = 0..rhs.size()-1.
VandermondeSolution vandermonde_solve(std::span<const Complex> nodes, std::span<const Complex> rhs);

}  // namespace meroloc::linalg
