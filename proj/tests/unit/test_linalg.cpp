#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "meroloc/linalg.hpp"
#include "oracles.hpp"

using meroloc::ErrorKind;
using meroloc::linalg::Complex;
using meroloc::linalg::ComplexMatrix;
using meroloc::linalg::EigenClass;

namespace {

ComplexMatrix from_dense(const oracle::Dense& d) {
    ComplexMatrix m(d.size(), d[0].size());
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d[i].size(); ++j) m(i, j) = d[i][j];
    return m;
}

oracle::Dense random_dense(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    std::normal_distribution<double> g;
    auto d = oracle::zeros(r, c);
    for (auto& row : d)
        for (auto& x : row) x = {g(rng), g(rng)};
    return d;
}

// Sum of `rank` random outer products.
oracle::Dense low_rank(std::mt19937_64& rng, std::size_t n, std::size_t rank) {
    auto d = oracle::zeros(n, n);
    for (std::size_t r = 0; r < rank; ++r) {
        const auto u = random_dense(rng, n, 1);
        const auto v = random_dense(rng, 1, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] += u[i][0] * v[0][j];
    }
    return d;
}

}  // namespace

TEST(ComplexMatrix, RejectsNonFiniteEntries) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(ComplexMatrix(1, 2, {Complex(1, 0), Complex(nan, 0)}), meroloc::Error);
    EXPECT_THROW(ComplexMatrix(2, 2, {Complex(1, 0)}), meroloc::Error);
}

TEST(ComplexMatrix, IdentityAndProducts) {
    const auto id = ComplexMatrix::identity(3);
    const std::vector<Complex> x = {{1, 2}, {3, -1}, {0, 5}};
    EXPECT_EQ(id.multiply(x), x);
    ComplexMatrix a(2, 2, {{1, 1}, {2, 0}, {0, -1}, {3, 0}});
    const auto aa = a.multiply(ComplexMatrix::identity(2));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(aa(i, j), a(i, j));
    EXPECT_DOUBLE_EQ(a.norm_inf(), std::abs(Complex(0, -1)) + 3.0);
}

TEST(NumericalRank, MatchesJacobiOracleOnLowRankMatrices) {
    std::mt19937_64 rng(7);
    for (std::size_t n = 2; n <= 8; ++n) {
        for (std::size_t rank = 0; rank <= n; ++rank) {
            const auto d = low_rank(rng, n, rank);
            const auto sv = oracle::jacobi_singular_values(d);
            const double tol = 1e-10 * std::max(1.0, sv.front());
            const auto expected = static_cast<std::size_t>(
                std::count_if(sv.begin(), sv.end(), [tol](double s) { return s > tol; }));
            EXPECT_EQ(expected, rank);
            EXPECT_EQ(meroloc::linalg::numerical_rank(from_dense(d), tol), rank) << "n=" << n;
        }
    }
}

TEST(NumericalRank, SingularValuesAgreeWithOracle) {
    std::mt19937_64 rng(11);
    const auto d = random_dense(rng, 6, 6);
    const auto expected = oracle::jacobi_singular_values(d);
    const auto got = meroloc::linalg::singular_values(from_dense(d));
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12 * expected.front());
}

TEST(NumericalRank, ZeroMatrixHasRankZero) {
    EXPECT_EQ(meroloc::linalg::numerical_rank(ComplexMatrix(4, 4), 0.0), 0u);
}

TEST(GeneralizedEig, DiagonalPencil) {
    const std::vector<Complex> a = {{2, 0}, {0, 3}, {-1, 1}};
    const std::vector<Complex> b = {{1, 0}, {1, 0}, {2, 0}};
    const auto eig = meroloc::linalg::generalized_eig(ComplexMatrix::diagonal(a), ComplexMatrix::diagonal(b));
    ASSERT_EQ(eig.size(), 3u);
    std::vector<Complex> values;
    for (const auto& e : eig) {
        ASSERT_TRUE(e.finite());
        values.push_back(e.value());
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const Complex target = a[i] / b[i];
        EXPECT_TRUE(std::any_of(values.begin(), values.end(), [&](Complex v) { return std::abs(v - target) < 1e-14; }));
    }
}

TEST(GeneralizedEig, RandomPencilEigenvaluesMakeThePencilSingular) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 7;
        const auto a = random_dense(rng, n, n);
        const auto b = random_dense(rng, n, n);
        const auto eig = meroloc::linalg::generalized_eig(from_dense(a), from_dense(b));
        ASSERT_EQ(eig.size(), n);
        for (const auto& e : eig) {
            ASSERT_TRUE(e.finite());
            EXPECT_LT(oracle::pencil_residual(a, b, e.value()), 1e-12);
            // Right eigenvector satisfies A x = lambda B x.
            const auto ax = from_dense(a).multiply(e.vector);
            const auto bx = from_dense(b).multiply(e.vector);
            double res = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                res = std::max(res, std::abs(ax[i] - e.value() * bx[i]));
                scale = std::max(scale, std::abs(ax[i]) + std::abs(e.value() * bx[i]));
            }
            EXPECT_LT(res, 1e-10 * scale);
        }
    }
}

TEST(GeneralizedEig, SingularBGivesInfiniteEigenvalue) {
    ComplexMatrix a(2, 2, {{1, 0}, {0, 0}, {0, 0}, {2, 0}});
    ComplexMatrix b(2, 2, {{1, 0}, {0, 0}, {0, 0}, {0, 0}});
    const auto eig = meroloc::linalg::generalized_eig(a, b);
    int finite = 0, infinite = 0;
    for (const auto& e : eig) {
        if (e.classification == EigenClass::Finite) {
            ++finite;
            EXPECT_NEAR(std::abs(e.value() - 1.0), 0.0, 1e-14);
        }
        if (e.classification == EigenClass::Infinite) ++infinite;
    }
    EXPECT_EQ(finite, 1);
    EXPECT_EQ(infinite, 1);
}

TEST(GeneralizedEig, CommonNullSpaceIsIndeterminate) {
    ComplexMatrix a(2, 2, {{1, 0}, {0, 0}, {0, 0}, {0, 0}});
    ComplexMatrix b(2, 2, {{1, 0}, {0, 0}, {0, 0}, {0, 0}});
    const auto eig = meroloc::linalg::generalized_eig(a, b);
    EXPECT_EQ(std::count_if(eig.begin(), eig.end(),
                            [](const auto& e) { return e.classification == EigenClass::Indeterminate; }),
              1);
}

TEST(GeneralizedEig, RejectsNonSquareOrMismatched) {
    EXPECT_THROW(meroloc::linalg::generalized_eig(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), meroloc::Error);
    EXPECT_THROW(meroloc::linalg::generalized_eig(ComplexMatrix(2, 2), ComplexMatrix(3, 3)), meroloc::Error);
}

TEST(VandermondeSolve, RecoversExactWeights) {
    const std::vector<Complex> nodes = {{0.9, 0.1}, {-0.3, 0.7}, {0.2, -0.8}};
    const std::vector<oracle::WeightedNode> wn = {{nodes[0], 1.0}, {nodes[1], -2.0}, {nodes[2], 3.0}};
    const auto rhs = oracle::power_sums(wn, 6);
    const auto sol = meroloc::linalg::vandermonde_solve(nodes, rhs);
    ASSERT_EQ(sol.weights.size(), 3u);
    EXPECT_NEAR(std::abs(sol.weights[0] - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sol.weights[1] + 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sol.weights[2] - 3.0), 0.0, 1e-12);
    EXPECT_LT(sol.residual, 1e-12);
}

TEST(VandermondeSolve, AgreesWithNormalEquationsOnNoisyData) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 1e-3);
    const std::vector<Complex> nodes = {{0.5, 0.5}, {-0.7, 0.1}, {0.1, -0.9}, {0.95, 0.0}};
    std::vector<oracle::WeightedNode> wn;
    for (const auto& z : nodes) wn.push_back({z, 1.0});
    auto rhs = oracle::power_sums(wn, 10);
    for (auto& r : rhs) r += Complex(noise(rng), noise(rng));
    const auto sol = meroloc::linalg::vandermonde_solve(nodes, rhs);
    const auto expected = oracle::normal_equation_weights(nodes, rhs);
    for (std::size_t i = 0; i < nodes.size(); ++i) EXPECT_NEAR(std::abs(sol.weights[i] - expected[i]), 0.0, 1e-9);
    EXPECT_GT(sol.residual, 0.0);
}

TEST(VandermondeSolve, DuplicateNodesAreDegenerate) {
    const std::vector<Complex> nodes = {{0.5, 0.0}, {0.5, 0.0}};
    const std::vector<Complex> rhs = {2.0, 1.0, 0.5};
    try {
        (void)meroloc::linalg::vandermonde_solve(nodes, rhs);
        FAIL();
    } catch (const meroloc::Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateSystem);
    }
}

TEST(GeneralizedEig, RandomFiveByFiveMatchesDeterminantRoots) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double radius = 3.0;
    int compared = 0;
    for (int trial = 0; trial < 4; ++trial) {
        auto a = oracle::zeros(5, 5), b = oracle::zeros(5, 5);
        for (auto* m : {&a, &b})
            for (auto& row : *m)
                for (auto& x : row) x = {u(rng), u(rng)};
        const auto eig = meroloc::linalg::generalized_eig(from_dense(a), from_dense(b));
        const auto roots = oracle::det_roots(a, b, radius);
        std::vector<Complex> inside;
        for (const auto& e : eig)
            if (e.finite() && std::abs(e.value().real()) < 0.9 * radius && std::abs(e.value().imag()) < 0.9 * radius)
                inside.push_back(e.value());
        for (const Complex lambda : inside) {
            double best = std::numeric_limits<double>::infinity();
            for (const Complex r : roots) best = std::min(best, std::abs(r - lambda));
            EXPECT_LT(best, 1e-8) << lambda;
            ++compared;
        }
        for (const Complex r : roots) {
            if (std::abs(r.real()) > 0.9 * radius || std::abs(r.imag()) > 0.9 * radius) continue;
            EXPECT_TRUE(std::any_of(inside.begin(), inside.end(), [&](Complex v) { return std::abs(v - r) < 1e-8; }))
                << r;
        }
    }
    EXPECT_GT(compared, 5);
}

TEST(GeneralizedEig, IdentityBMatchesStandardEigensolve) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_dense(rng, 6, 6);
        Eigen::MatrixXcd m(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) m(i, j) = a[i][j];
        const Eigen::VectorXcd ref = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m, false).eigenvalues();
        const auto eig = meroloc::linalg::generalized_eig(from_dense(a), ComplexMatrix::identity(6));
        ASSERT_EQ(eig.size(), 6u);
        for (const auto& e : eig) {
            ASSERT_TRUE(e.finite());
            double best = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 6; ++k) best = std::min(best, std::abs(ref(k) - e.value()));
            EXPECT_LT(best, 1e-10);
        }
    }
}

TEST(NumericalRank, InvariantUnderUnitaryMultiplication) {
    std::mt19937_64 rng(43);
    for (std::size_t rank = 0; rank <= 6; ++rank) {
        const auto d = low_rank(rng, 6, rank);
        const auto q = oracle::random_unitary(rng, 6);
        const double tol = 1e-10;
        const auto r0 = meroloc::linalg::numerical_rank(from_dense(d), tol);
        EXPECT_EQ(r0, rank);
        EXPECT_EQ(meroloc::linalg::numerical_rank(from_dense(oracle::product(q, d)), tol), r0);
        EXPECT_EQ(meroloc::linalg::numerical_rank(from_dense(oracle::product(d, q)), tol), r0);
    }
}

TEST(VandermondeSolve, ResynthesisWithinReportedResidual) {
    std::mt19937_64 rng(44);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 5, k = 2 * n + 3;
        std::vector<Complex> nodes(n), rhs(k);
        for (std::size_t j = 0; j < n; ++j) nodes[j] = std::polar(0.3 + 0.6 * (j + 1.0) / n, 1.3 * j + 0.2 * trial);
        for (auto& x : rhs) x = {g(rng), g(rng)};
        const auto sol = meroloc::linalg::vandermonde_solve(nodes, rhs);
        double res = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            Complex s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += sol.weights[j] * std::pow(nodes[j], double(i));
            res += std::norm(s - rhs[i]);
        }
        EXPECT_LE(std::sqrt(res), sol.residual + 1e-12);
    }
}
