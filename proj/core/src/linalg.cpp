#include "meroloc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace meroloc::linalg {

namespace {

using EigenMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenMatrix to_eigen(const ComplexMatrix& m) {
    EigenMatrix out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

void require_finite(const ComplexMatrix& m, const char* what) {
    if (!m.all_finite())
        throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite matrix entry");
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw Error(ErrorKind::InvalidInput, "ComplexMatrix: entry count does not match shape");
    if (!all_finite())
        throw Error(ErrorKind::InvalidInput, "ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

double ComplexMatrix::norm_inf() const noexcept {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) row += std::abs((*this)(i, j));
        best = std::max(best, row);
    }
    return best;
}

bool ComplexMatrix::all_finite() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), finite);
}

std::vector<Complex> ComplexMatrix::multiply(std::span<const Complex> x) const {
    if (x.size() != cols_) throw Error(ErrorKind::InvalidInput, "multiply: dimension mismatch");
    std::vector<Complex> y(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

ComplexMatrix ComplexMatrix::multiply(const ComplexMatrix& other) const {
    if (other.rows_ != cols_) throw Error(ErrorKind::InvalidInput, "multiply: dimension mismatch");
    ComplexMatrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Complex a = (*this)(i, k);
            for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
        }
    return out;
}

std::vector<double> singular_values(const ComplexMatrix& m) {
    require_finite(m, "singular_values");
    if (m.rows() == 0 || m.cols() == 0) return {};
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(m));
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

std::size_t numerical_rank(const ComplexMatrix& m, double abs_tol) {
    if (!(abs_tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "numerical_rank: abs_tol must be >= 0");
    const auto sigma = singular_values(m);
    if (sigma.empty()) return 0;
    const double threshold = std::max(abs_tol, sigma.front() * 50.0 * kUnitRoundoff);
    return static_cast<std::size_t>(
        std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > threshold; }));
}

std::vector<GeneralizedEigenvalue> generalized_eig(const ComplexMatrix& a, const ComplexMatrix& b,
                                                   const EigOptions& options) {
    if (!a.square() || !b.square() || a.rows() != b.rows())
        throw Error(ErrorKind::InvalidInput, "generalized_eig: A and B must be square and equal size");
    require_finite(a, "generalized_eig");
    require_finite(b, "generalized_eig");

    const auto n = static_cast<lapack_int>(a.rows());
    if (n == 0) return {};

    // zggev overwrites its inputs with the generalized Schur form.
    std::vector<Complex> sa(a.entries().begin(), a.entries().end());
    std::vector<Complex> sb(b.entries().begin(), b.entries().end());
    std::vector<Complex> alpha(static_cast<std::size_t>(n));
    std::vector<Complex> beta(static_cast<std::size_t>(n));
    std::vector<Complex> vr(options.compute_vectors ? static_cast<std::size_t>(n * n) : 1);
    Complex vl_dummy{};

    const lapack_int info = LAPACKE_zggev(LAPACK_ROW_MAJOR, 'N', options.compute_vectors ? 'V' : 'N', n,
                                          sa.data(), n, sb.data(), n, alpha.data(), beta.data(),
                                          &vl_dummy, 1, vr.data(), options.compute_vectors ? n : 1);
    if (info < 0)
        throw Error(ErrorKind::InvalidInput,
                    "generalized_eig: illegal argument " + std::to_string(-info) + " to zggev");

    const double tol = options.beta_tolerance * std::max({a.norm_inf(), b.norm_inf(), 1e-300});

    std::vector<GeneralizedEigenvalue> result(static_cast<std::size_t>(n));
    for (lapack_int j = 0; j < n; ++j) {
        auto& e = result[static_cast<std::size_t>(j)];
        e.alpha = alpha[static_cast<std::size_t>(j)];
        e.beta = beta[static_cast<std::size_t>(j)];
        const double abs_alpha = std::abs(e.alpha);
        const double abs_beta = std::abs(e.beta);
        if (abs_alpha <= tol && abs_beta <= tol)
            e.classification = EigenClass::Indeterminate;
        else if (abs_beta <= tol * std::max(abs_alpha, 1.0))
            e.classification = EigenClass::Infinite;
        else
            e.classification = EigenClass::Finite;

        if (e.finite() && options.compute_vectors) {
            e.vector.resize(static_cast<std::size_t>(n));
            for (lapack_int i = 0; i < n; ++i)
                e.vector[static_cast<std::size_t>(i)] = vr[static_cast<std::size_t>(i * n + j)];
        }
    }

    if (info > 0) {
        // Entries info..n-1 (0-based) are valid when QZ stalls at step info.
        std::vector<GeneralizedEigenvalue> partial;
        if (info <= n)
            partial.assign(result.begin() + info, result.end());
        throw ConvergenceError("generalized_eig: QZ iteration failed to converge (info=" +
                                   std::to_string(info) + ")",
                               std::move(partial));
    }
    return result;
}

VandermondeSolution vandermonde_solve(std::span<const Complex> nodes, std::span<const Complex> rhs) {
    const std::size_t n = nodes.size();
    const std::size_t k = rhs.size();
    if (n == 0) throw Error(ErrorKind::InvalidInput, "vandermonde_solve: no nodes");
    if (k < n) throw Error(ErrorKind::InvalidInput, "vandermonde_solve: fewer equations than nodes");
    for (std::size_t i = 0; i < n; ++i) {
        if (!finite(nodes[i])) throw Error(ErrorKind::InvalidInput, "vandermonde_solve: non-finite node");
        for (std::size_t j = i + 1; j < n; ++j) {
            const double scale = std::max({1.0, std::abs(nodes[i]), std::abs(nodes[j])});
            if (std::abs(nodes[i] - nodes[j]) <= 1e-14 * scale)
                throw Error(ErrorKind::DegenerateSystem, "vandermonde_solve: duplicate nodes");
        }
    }

    Eigen::MatrixXcd v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    Eigen::VectorXcd b(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < n; ++j) {
        Complex p = 1.0;
        for (std::size_t row = 0; row < k; ++row) {
            v(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = p;
            p *= nodes[j];
        }
    }
    for (std::size_t row = 0; row < k; ++row) b(static_cast<Eigen::Index>(row)) = rhs[row];

    const Eigen::VectorXcd w = v.colPivHouseholderQr().solve(b);

    VandermondeSolution out;
    out.weights.assign(w.data(), w.data() + w.size());
    out.residual = (v * w - b).norm();
    return out;
}

}  // namespace meroloc::linalg
