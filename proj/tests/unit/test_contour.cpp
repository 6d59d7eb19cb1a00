#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "meroloc/contour.hpp"
#include "oracles.hpp"
#include "reference_values.hpp"

using meroloc::Complex;
using meroloc::ErrorKind;
using meroloc::FunctionHandle;
using meroloc::Rectangle;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = 1e-10;

FunctionHandle lambda(const char* name, std::function<Complex(Complex)> f) {
    return FunctionHandle(name, std::move(f));
}

Rectangle square() { return Rectangle::from_corners({-1.0, -1.0}, {1.0, 1.0}); }

std::vector<Complex> exact_moments(const Rectangle& map, const std::vector<reference::Root>& roots, std::size_t n) {
    std::vector<oracle::WeightedNode> nodes;
    for (const auto& r : roots)
        nodes.push_back({oracle::annulus_map(r.z, map.z0, map.alpha, map.length, map.eps0), double(r.multiplicity)});
    return oracle::power_sums(nodes, n);
}

// Distance from z to the boundary of rect, in the rotated frame.
double boundary_distance(const Rectangle& r, Complex z) {
    const Complex w = r.to_rotated(z);
    const double dx = 0.5 * r.length - std::abs(w.real() - r.z0.real());
    const double dy = std::min(r.z0.imag() - w.imag(), w.imag() - (r.z0.imag() - r.height));
    return std::abs(std::min(dx, dy));
}

}  // namespace

TEST(Trace, IdentityWindsOnce) {
    const auto tr = meroloc::trace_argument(lambda("z", [](Complex z) { return z; }), square());
    EXPECT_NEAR(tr.theta.back() - tr.theta.front(), kTwoPi, 1e-12);
    EXPECT_EQ(meroloc::winding_number(tr), 1);
}

TEST(Trace, ReciprocalWindsBackwards) {
    const auto tr = meroloc::trace_argument(lambda("1/z", [](Complex z) { return 1.0 / z; }), square());
    EXPECT_NEAR(tr.theta.back() - tr.theta.front(), -kTwoPi, 1e-12);
    EXPECT_EQ(meroloc::winding_number(tr), -1);
}

TEST(Trace, ConstantHasNoJumps) {
    const auto tr = meroloc::trace_argument(lambda("5", [](Complex) { return Complex(5.0, 0.0); }), square());
    for (double t : tr.theta) EXPECT_EQ(t, 0.0);
    EXPECT_EQ(meroloc::winding_number(tr), 0);
}

TEST(Trace, InvariantsHoldForExampleOne) {
    const auto f = meroloc::make_rational(meroloc::examples::three_zeros_double_pole());
    const auto rect = Rectangle::from_corners({-1.3, -1.1}, {1.2, 1.4}, 0.2);
    const auto tr = meroloc::trace_argument(f, rect);
    int expected = 0;
    for (const auto& r : reference::kExample1Roots)
        if (meroloc::contains(rect, r.z, 0.0)) expected += r.multiplicity;
    ASSERT_GE(tr.points.size(), 5u);
    EXPECT_EQ(tr.points.front(), tr.points.back());
    for (std::size_t i = 0; i + 1 < tr.theta.size(); ++i) EXPECT_LT(std::abs(tr.theta[i + 1] - tr.theta[i]), std::numbers::pi);
    for (std::size_t i = 0; i < tr.points.size(); ++i) {
        const Complex rebuilt = std::exp(Complex(tr.log_abs[i], std::fmod(tr.theta[i], kTwoPi)));
        EXPECT_LT(std::abs(rebuilt - tr.f_values[i]), 1e-12 * std::abs(tr.f_values[i]));
    }
    EXPECT_EQ(meroloc::winding_number(tr), expected);
}

TEST(Winding, MultipleZeroAndEmptyRegion) {
    const Complex a(0.2, -0.1);
    const auto cube = lambda("cube", [a](Complex z) { return (z - a) * (z - a) * (z - a); });
    EXPECT_EQ(meroloc::winding_number(meroloc::trace_argument(cube, square())), 3);
    EXPECT_EQ(meroloc::winding_number(meroloc::trace_argument(cube, Rectangle::from_corners({2, 2}, {3, 3}))), 0);
}

TEST(Winding, RejectsNonIntegerTrace) {
    meroloc::BoundaryTrace tr;
    tr.theta = {0.0, 0.5 * kTwoPi};
    EXPECT_THROW((void)meroloc::winding_number(tr), meroloc::Error);
}

TEST(Trace, RootOnBoundaryIsBoundaryProximity) {
    const auto f = lambda("z-1", [](Complex z) { return z - 1.0; });
    try {
        (void)meroloc::trace_argument(f, square());
        FAIL();
    } catch (const meroloc::Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BoundaryProximity);
    }
}

TEST(Trace, OverflowOnBoundaryIsBoundaryProximity) {
    const auto f = lambda("huge", [](Complex z) { return std::exp(800.0 * z); });
    try {
        (void)meroloc::trace_argument(f, square());
        FAIL();
    } catch (const meroloc::Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BoundaryProximity);
    }
}

TEST(Moments, IdentityGivesImageOfOrigin) {
    const auto r = Rectangle::from_corners({-1.0, -0.5}, {1.5, 1.0}, 0.3);
    const auto m = meroloc::moments(lambda("z", [](Complex z) { return z; }), r, 3, kEps);
    ASSERT_EQ(m.values.size(), 6u);
    EXPECT_EQ(m.values[0], Complex(1.0, 0.0));
    EXPECT_EQ(m.winding, 1);
    const Complex t0 = meroloc::to_annulus(r, 0.0);
    for (std::size_t k = 1; k < 6; ++k) EXPECT_LT(std::abs(m.values[k] - std::pow(t0, double(k))), kEps) << k;
    EXPECT_LE(m.eps_i, kEps);
    EXPECT_EQ(m.zeta_start, meroloc::to_annulus(r, r.vertices()[Rectangle::D]));
}

TEST(Moments, ExampleOneMatchesPowerSumsOfKnownRoots) {
    const auto f = meroloc::make_rational(meroloc::examples::three_zeros_double_pole());
    const auto r = square();
    const auto m = meroloc::moments(f, r, 3, 1e-10);
    const std::vector<reference::Root> roots(reference::kExample1Roots.begin(), reference::kExample1Roots.end());
    const auto expected = exact_moments(r, roots, 6);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_LT(std::abs(m.values[k] - expected[k]), 1e-8) << k;
    EXPECT_EQ(m.winding, 1);
}

TEST(Moments, NoRootsGivesZeroMoments) {
    const auto m = meroloc::moments(lambda("exp", [](Complex z) { return std::exp(z); }), square(), 4, kEps);
    EXPECT_EQ(m.winding, 0);
    for (const auto& v : m.values) EXPECT_LT(std::abs(v), kEps);
}

TEST(Moments, ReciprocalOfZ) {
    const auto r = square();
    const auto m = meroloc::moments(lambda("1/z", [](Complex z) { return 1.0 / z; }), r, 2, kEps);
    EXPECT_EQ(m.values[0], Complex(-1.0, 0.0));
    EXPECT_LT(std::abs(m.values[1] + meroloc::to_annulus(r, 0.0)), kEps);
}

TEST(Moments, ZeroWindingMomentIsExactlyTheInteger) {
    const auto f = meroloc::make_rational(meroloc::examples::three_zeros_double_pole());
    for (double shift : {0.0, 0.3, -0.2}) {
        const auto r = Rectangle::from_corners({-1.0 + shift, -1.0}, {1.0, 1.0 + shift});
        const auto m = meroloc::moments(f, r, 1, 1e-8);
        EXPECT_EQ(m.values[0].imag(), 0.0);
        EXPECT_EQ(m.values[0].real(), double(m.winding));
    }
}

TEST(Moments, ParentEqualsSumOfChildren) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    std::uniform_int_distribution<int> count(1, 5), mult(1, 2);
    const auto parent = Rectangle::from_corners({-1.0, -1.0}, {1.0, 1.0}, 0.1);
    const double eps = 1e-9;
    int trials = 0;
    while (trials < 50) {
        meroloc::RationalSpec spec;
        const int nz = count(rng), np = count(rng) - 1;
        bool ok = true;
        auto place = [&](std::vector<meroloc::RootSpec>& list, int n) {
            for (int i = 0; i < n; ++i) {
                const Complex z = parent.from_rotated(parent.z0 + Complex(u(rng) * 0.5 * parent.length,
                                                                          -(0.5 + 0.5 * u(rng)) * parent.height));
                list.push_back({z, mult(rng)});
            }
        };
        place(spec.zeros, nz);
        place(spec.poles, np);
        const auto halves = meroloc::subdivide(parent);
        for (const auto& list : {spec.zeros, spec.poles})
            for (const auto& root : list)
                for (const auto& h : halves) ok = ok && boundary_distance(h, root.location) > 0.05;
        try {
            spec.validate();
        } catch (const meroloc::Error&) {
            ok = false;
        }
        if (!ok) continue;
        ++trials;
        const auto f = meroloc::make_rational(spec);
        meroloc::ContourOptions opt;
        opt.map_rect = parent;
        const auto whole = meroloc::ContourIntegrator(f, parent).moments(8, eps);
        auto a = meroloc::ContourIntegrator(f, halves[0], opt).moments(8, eps);
        auto b = meroloc::ContourIntegrator(f, halves[1], opt).moments(8, eps);
        EXPECT_EQ(whole.winding, a.winding + b.winding);
        for (std::size_t k = 0; k < 8; ++k)
            EXPECT_LT(std::abs(whole.values[k] - a.values[k] - b.values[k]), 3.0 * eps) << "trial " << trials << " k " << k;
    }
}

TEST(Moments, TighterToleranceChangesLittle) {
    const auto f = meroloc::make_rational(meroloc::examples::three_zeros_double_pole());
    const auto r = square();
    const double eps = 1e-7;
    const auto coarse = meroloc::moments(f, r, 4, eps);
    const auto fine = meroloc::moments(f, r, 4, eps / 10.0);
    for (std::size_t k = 0; k < coarse.values.size(); ++k)
        EXPECT_LT(std::abs(coarse.values[k] - fine.values[k]), 2.0 * eps) << k;
}

TEST(Moments, BudgetExhaustionReportsAchievedError) {
    // Root very close to (but off) the boundary forces heavy refinement.
    const auto f = lambda("near", [](Complex z) { return z - Complex(0.3, 1.0 - 1e-7); });
    meroloc::ContourOptions opt;
    opt.eval_budget = 2000;
    meroloc::ContourIntegrator integrator(f, square(), opt);
    try {
        (void)integrator.moments(8, 1e-14);
        FAIL();
    } catch (const meroloc::ToleranceNotMetError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ToleranceNotMet);
        EXPECT_GT(e.achieved(), 1e-14);
    }
}

TEST(Moments, LaterRequestsReuseSamples) {
    const auto f = meroloc::make_rational(meroloc::examples::three_zeros_double_pole());
    meroloc::ContourIntegrator integrator(f, square());
    const auto first = integrator.moments(16, 1e-9);
    const auto before = integrator.evaluations();
    const auto again = integrator.moments(16, 1e-9);
    EXPECT_EQ(integrator.evaluations(), before);
    for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(first.values[k], again.values[k]);
}

TEST(Moments, RejectsBadArguments) {
    const auto f = lambda("z", [](Complex z) { return z; });
    EXPECT_THROW((void)meroloc::moments(f, square(), 0, 1e-8), meroloc::Error);
    EXPECT_THROW((void)meroloc::moments(f, square(), 2, 0.0), meroloc::Error);
}
