#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "meroloc/prony.hpp"
#include "oracles.hpp"

using meroloc::Complex;
using meroloc::ErrorKind;
using meroloc::MomentVector;

namespace {

constexpr double kPi = std::numbers::pi;

MomentVector synthetic(const std::vector<std::pair<Complex, int>>& roots, std::size_t count, double eps = 1e-14) {
    std::vector<oracle::WeightedNode> nodes;
    int w = 0;
    for (const auto& [z, n] : roots) {
        nodes.push_back({z, double(n)});
        w += n;
    }
    MomentVector m;
    m.values = oracle::power_sums(nodes, count);
    m.values[0] = Complex(double(w), 0.0);
    m.winding = w;
    m.eps_i = eps;
    m.requested_eps = eps;
    return m;
}

MomentVector raw(std::vector<Complex> values, int w = 0) {
    MomentVector m;
    m.values = std::move(values);
    m.winding = w;
    m.eps_i = m.requested_eps = 1e-14;
    return m;
}

bool contains_value(const std::vector<Complex>& set, Complex z, double tol) {
    return std::any_of(set.begin(), set.end(), [&](Complex v) { return std::abs(v - z) <= tol; });
}

// Direct substitution into the condition bound.
double condition_formula(const std::vector<Complex>& z) {
    const double n = double(z.size());
    double rp = 0, rm = INFINITY;
    for (auto v : z) {
        rp = std::max(rp, std::abs(v));
        rm = std::min(rm, std::abs(v));
    }
    double worst = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double p = 1;
        for (std::size_t j = 0; j < z.size(); ++j)
            if (i != j) p *= std::pow(std::abs(std::exp(Complex(0, std::arg(z[i]))) - std::exp(Complex(0, std::arg(z[j])))), -2);
        worst = std::max(worst, p);
    }
    return n * n * std::pow(rp / rm, 2 * (n - 1)) * std::pow(1 + rp, 2 * (n - 1)) * worst;
}

}  // namespace

TEST(Hankel, Definition) {
    const auto m = raw({{1, 0}, {2, 0}, {3, 0}});
    const auto h = meroloc::hankel(m, 2, 0);
    EXPECT_EQ(h(0, 0), Complex(1, 0));
    EXPECT_EQ(h(0, 1), Complex(2, 0));
    EXPECT_EQ(h(1, 0), Complex(2, 0));
    EXPECT_EQ(h(1, 1), Complex(3, 0));
    try {
        (void)meroloc::hankel(m, 2, 1);
        FAIL();
    } catch (const meroloc::Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
    const auto h1 = meroloc::hankel(m, 1, 1);
    EXPECT_EQ(h1.rows(), 1u);
    EXPECT_EQ(h1(0, 0), Complex(2, 0));
}

TEST(CountRoots, ZeroMomentsHaveNoRoots) {
    EXPECT_EQ(meroloc::count_roots(raw(std::vector<Complex>(16)), 6), 0u);
}

TEST(CountRoots, GeometricSequenceIsOneRoot) {
    std::vector<Complex> v(16);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(0.9, double(k));
    EXPECT_EQ(meroloc::count_roots(raw(v, 1), 6), 1u);
}

TEST(CountRoots, MixedZerosAndPolesAgreeWithSvdOracle) {
    const auto m = synthetic({{std::polar(0.8, kPi / 4), 2}, {std::polar(0.7, -2 * kPi / 3), -1}, {0.95, 1}}, 16);
    // Oracle: ranks of the growing Hankel sections.
    std::vector<std::size_t> ranks;
    for (std::size_t n = 1; n <= 7; ++n) {
        auto d = oracle::zeros(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = m.values[i + j];
        const auto sv = oracle::jacobi_singular_values(d);
        ranks.push_back(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > 1e-10 * sv.front(); }));
    }
    EXPECT_EQ(ranks[3], 3u);
    EXPECT_EQ(ranks[4], 3u);
    EXPECT_EQ(meroloc::count_roots(m, 6), 3u);
}

TEST(CountRoots, SentinelWhenRankNeverStabilises) {
    std::mt19937_64 rng(1);
    const auto roots = oracle::random_annulus_roots(rng, 8, 0.5, 0.3);
    EXPECT_EQ(meroloc::count_roots(synthetic(roots, 16), 6), 7u);
}

TEST(CountRoots, ExplicitToleranceOverridesDefault) {
    const auto m = synthetic({{0.5, 1}, {-0.5, 1}}, 16);
    EXPECT_EQ(meroloc::count_roots(m, 6), 2u);
    EXPECT_EQ(meroloc::count_roots(m, 6, 1e3), 0u);
}

TEST(SolvePencil, SingleRoot) {
    const auto z = meroloc::solve_pencil(synthetic({{0.5, 1}}, 4), 1);
    ASSERT_EQ(z.size(), 1u);
    EXPECT_NEAR(std::abs(z[0] - 0.5), 0.0, 1e-15);
}

TEST(SolvePencil, SymmetricPair) {
    const auto z = meroloc::solve_pencil(synthetic({{0.8, 1}, {-0.8, 1}}, 6), 2);
    ASSERT_EQ(z.size(), 2u);
    EXPECT_TRUE(contains_value(z, 0.8, 1e-12));
    EXPECT_TRUE(contains_value(z, -0.8, 1e-12));
}

TEST(SolvePencil, DegeneratePencilIsReported) {
    try {
        (void)meroloc::solve_pencil(raw(std::vector<Complex>(8)), 2);
        FAIL();
    } catch (const meroloc::Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegeneratePencil);
    }
}

TEST(Condition, SingleRootIsPerfectlyConditioned) {
    const std::vector<Complex> z = {std::polar(0.3, 1.0)};
    EXPECT_EQ(meroloc::estimate_condition(z), 1.0);
}

TEST(Condition, AntipodalPairMatchesDirectSubstitution) {
    const std::vector<Complex> z = {1.0, -1.0};
    EXPECT_NEAR(meroloc::estimate_condition(z), 4.0, 1e-12);
    EXPECT_NEAR(condition_formula(z), 4.0, 1e-12);
}

TEST(Condition, AngularClusterBlowsUp) {
    const std::vector<Complex> z = {1.0, std::polar(1.0, 0.01)};
    EXPECT_GT(meroloc::estimate_condition(z), 1e4);
}

TEST(Condition, CoincidentRootsAreInfinite) {
    const std::vector<Complex> z = {0.5, 0.5};
    EXPECT_TRUE(std::isinf(meroloc::estimate_condition(z)));
}

TEST(Condition, AgreesWithFormulaAndIsRotationInvariant) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> phi(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
        const auto roots = oracle::random_annulus_roots(rng, 1 + trial % 6, 0.3, 0.1);
        std::vector<Complex> z, rotated;
        const Complex turn = std::polar(1.0, phi(rng));
        for (const auto& [v, n] : roots) {
            z.push_back(v);
            rotated.push_back(v * turn);
        }
        const double k = meroloc::estimate_condition(z);
        EXPECT_NEAR(k, condition_formula(z), 1e-9 * k);
        EXPECT_NEAR(meroloc::estimate_condition(rotated), k, 1e-9 * k);
    }
}

TEST(ErrorEstimate, ExactMomentsGiveTinyDeltas) {
    const auto m = synthetic({{0.6, 1}, {Complex(0.0, -0.7), 1}}, 16);
    const auto z = meroloc::solve_pencil(m, 2);
    const auto e = meroloc::estimate_errors(m, 2, z);
    ASSERT_TRUE(e.available);
    for (double d : e.deltas) EXPECT_LE(d, 1e-12);
}

TEST(ErrorEstimate, InjectedNoiseIsDetected) {
    auto m = synthetic({{0.6, 1}, {Complex(0.0, -0.7), 1}}, 16);
    m.values[3] += 1e-6;
    const auto z = meroloc::solve_pencil(m, 2);
    const auto e = meroloc::estimate_errors(m, 2, z);
    for (double d : e.deltas) EXPECT_GT(d, 1e-8);
}

TEST(ErrorEstimate, GreedyMatchingIsNearOptimal) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 1e-7);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const auto roots = oracle::random_annulus_roots(rng, n, 0.5, 0.4);
        auto m = synthetic(roots, 2 * n + 4);
        for (auto& v : m.values) v += Complex(noise(rng), noise(rng));
        const auto z = meroloc::solve_pencil(m, n);
        const auto e = meroloc::estimate_errors(m, n, z);
        ASSERT_TRUE(e.available);
        // Rebuild the matched set from the enlarged pencil via the oracle.
        meroloc::linalg::EigOptions opt;
        const auto eig = meroloc::linalg::generalized_eig(meroloc::hankel(m, n + 1, 1), meroloc::hankel(m, n + 1, 0), opt);
        std::vector<Complex> finite;
        for (const auto& ev : eig)
            if (ev.finite()) finite.push_back(ev.value());
        if (finite.size() > 8) continue;
        double greedy = 0;
        for (double d : e.deltas) greedy += 2 * d;
        EXPECT_LE(greedy, 1.5 * oracle::optimal_matching_cost(z, finite) + 1e-15) << trial;
    }
}

TEST(Multiplicities, SingleDoubleRoot) {
    const auto m = synthetic({{0.4, 2}}, 4);
    const std::vector<Complex> z = {0.4};
    EXPECT_EQ(meroloc::multiplicities(m, z).values, std::vector<int>({2}));
}

TEST(Multiplicities, RoundingContract) {
    std::vector<oracle::WeightedNode> nodes = {{0.5, 0.9999999}, {Complex(0, 0.7), -2.0000001}};
    auto m = raw(oracle::power_sums(nodes, 4), -1);
    const std::vector<Complex> z = {0.5, Complex(0, 0.7)};
    EXPECT_EQ(meroloc::multiplicities(m, z).values, std::vector<int>({1, -2}));
}

TEST(Multiplicities, RejectsNonIntegerAndInconsistentSums) {
    std::vector<oracle::WeightedNode> nodes = {{0.5, 1.5}};
    const std::vector<Complex> z = {0.5};
    try {
        (void)meroloc::multiplicities(raw(oracle::power_sums(nodes, 4), 1), z);
        FAIL();
    } catch (const meroloc::Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MultiplicityInconsistency);
    }
    nodes = {{0.5, 1.0}};
    EXPECT_THROW((void)meroloc::multiplicities(raw(oracle::power_sums(nodes, 4), 2), z), meroloc::Error);
}

TEST(Prony, RoundTripOnRandomRootSets) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const auto roots = oracle::random_annulus_roots(rng, n, 0.3, 0.1);
        const auto m = synthetic(roots, 2 * n + 3);
        ASSERT_EQ(meroloc::count_roots(m, n), n) << trial;
        const auto result = meroloc::analyse(m, n);
        int sum = 0;
        for (std::size_t j = 0; j < n; ++j) {
            // Locate the recovered root matching each true root.
            std::size_t best = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (std::abs(result.zetas[i] - roots[j].first) < std::abs(result.zetas[best] - roots[j].first)) best = i;
            EXPECT_LT(std::abs(result.zetas[best] - roots[j].first), 1e-9) << trial;
            EXPECT_EQ(result.multiplicities[best], roots[j].second) << trial;
            EXPECT_LE(result.deltas[best], 1e-9) << trial;
            sum += result.multiplicities[best];
        }
        EXPECT_EQ(sum, m.winding);
    }
}

TEST(Prony, EnlargedPencilContainsTheRoots) {
    std::mt19937_64 rng(77);
    int collisions = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const auto roots = oracle::random_annulus_roots(rng, n, 0.3, 0.1);
        const auto m = synthetic(roots, 2 * n + 3);
        const auto eig = meroloc::linalg::generalized_eig(meroloc::hankel(m, n + 1, 1), meroloc::hankel(m, n + 1, 0));
        std::vector<Complex> finite;
        for (const auto& e : eig)
            if (e.finite()) finite.push_back(e.value());
        for (const auto& [z, mult] : roots) {
            // A spurious eigenvalue landing within 1e-6 of a root perturbs it
            // at the sqrt(u) level; otherwise the root is reproduced to 1e-10.
            std::vector<double> dist;
            for (auto v : finite) dist.push_back(std::abs(v - z));
            std::sort(dist.begin(), dist.end());
            ASSERT_FALSE(dist.empty()) << trial;
            const bool collision = dist.size() > 1 && dist[1] < 1e-6;
            EXPECT_LT(dist[0], collision ? 1e-7 : 1e-10) << trial << " n " << n;
            collisions += collision;
        }
    }
    EXPECT_LE(collisions, 2);
}
