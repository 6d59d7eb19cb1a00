#include "meroloc/functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace meroloc {

namespace {

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

// ---------------------------------------------------------------------------
// FunctionHandle

FunctionHandle::FunctionHandle(std::string name, Evaluator evaluator, Symmetry symmetry,
                               Replicator replicator) {
    if (!evaluator) throw Error(ErrorKind::InvalidInput, "FunctionHandle: empty evaluator");
    auto state = std::make_shared<State>();
    state->name = std::move(name);
    state->evaluator = std::move(evaluator);
    state->symmetry = symmetry;
    state->replicator = std::move(replicator);
    state->shared = std::make_shared<Shared>();
    state_ = std::move(state);
}

Complex FunctionHandle::operator()(Complex z) const {
    state_->shared->count.fetch_add(1, std::memory_order_relaxed);
    if (std::abs(z) > state_->validated_radius) flag_accuracy_degraded();
    const Complex value = state_->evaluator(z);
    if (!is_finite(value))
        throw Error(ErrorKind::Overflow, state_->name + ": non-finite value at z = (" +
                                             std::to_string(z.real()) + ", " +
                                             std::to_string(z.imag()) + ")");
    return value;
}

std::uint64_t FunctionHandle::evaluation_count() const noexcept {
    return state_->shared->count.load(std::memory_order_relaxed);
}

bool FunctionHandle::accuracy_degraded() const noexcept {
    return state_->shared->degraded.load(std::memory_order_relaxed);
}

void FunctionHandle::flag_accuracy_degraded() const noexcept {
    state_->shared->degraded.store(true, std::memory_order_relaxed);
}

FunctionHandle FunctionHandle::with_validated_radius(double radius) const {
    auto state = std::make_shared<State>(*state_);
    state->validated_radius = radius;
    return FunctionHandle(std::move(state));
}

FunctionHandle FunctionHandle::replicate() const {
    if (!state_->replicator) return *this;
    auto state = std::make_shared<State>(*state_);
    state->evaluator = state_->replicator();
    return FunctionHandle(std::move(state));
}

// ---------------------------------------------------------------------------
// Rational

void RationalSpec::validate() const {
    std::vector<Complex> all;
    for (const auto* list : {&zeros, &poles})
        for (const auto& r : *list) {
            if (r.multiplicity <= 0)
                throw Error(ErrorKind::InvalidInput, "rational: multiplicities must be positive");
            if (!is_finite(r.location))
                throw Error(ErrorKind::InvalidInput, "rational: non-finite root location");
            all.push_back(r.location);
        }
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (all[i] == all[j])
                throw Error(ErrorKind::InvalidInput, "rational: coincident zero/pole locations");
}

FunctionHandle make_rational(const RationalSpec& spec) {
    spec.validate();
    auto evaluator = [spec](Complex z) {
        Complex num = 1.0;
        for (const auto& r : spec.zeros)
            for (int m = 0; m < r.multiplicity; ++m) num *= z - r.location;
        Complex den = 1.0;
        for (const auto& p : spec.poles)
            for (int m = 0; m < p.multiplicity; ++m) den *= z - p.location;
        if (den == Complex{})
            throw Error(ErrorKind::Overflow, "rational: evaluation at a pole");
        return num / den;
    };
    return FunctionHandle("rational", std::move(evaluator));
}

// ---------------------------------------------------------------------------
// 3x3 transcendental determinant

Complex det3(const std::array<std::array<Complex, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

void Nlevp3Spec::validate() const {
    for (const auto* m : {&a0, &a1, &a2})
        for (const auto& row : *m)
            for (double v : row)
                if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "nlevp3: non-finite entry");
}

FunctionHandle make_nlevp3(const Nlevp3Spec& spec) {
    spec.validate();
    auto evaluator = [spec](Complex z) {
        const Complex e = std::exp(z) - 1.0;
        const Complex z2 = z * z;
        std::array<std::array<Complex, 3>, 3> m{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = e * spec.a2[i][j] + z2 * spec.a1[i][j] - spec.a0[i][j];
        return det3(m);
    };
    return FunctionHandle("nlevp3", std::move(evaluator));
}

// ---------------------------------------------------------------------------
// Faddeeva function

namespace {

constexpr double kTwoOverSqrtPi = 1.12837916709551257390;

// w(z) for x >= 0, y >= 0.
Complex faddeeva_first_quadrant(double x, double y) {
    const double xs = x / 6.3;
    const double ys = y / 4.4;
    const double q = xs * xs + ys * ys;
    const Complex z(x, y);

    if (q < 0.085264) {
        // exp(-z^2) (1 + 2i/sqrt(pi) z sum_n z^2n / (n! (2n+1)))
        const double rho = (1.0 - 0.85 * ys) * std::sqrt(q);
        const int n = static_cast<int>(std::lround(6.0 + 72.0 * rho));
        const Complex z2 = z * z;
        Complex sum = 1.0 / (2.0 * n + 1.0);
        for (int i = n; i >= 1; --i) sum = sum * z2 / static_cast<double>(i) + 1.0 / (2.0 * i - 1.0);
        return std::exp(-z2) * (1.0 + Complex(0.0, kTwoOverSqrtPi) * z * sum);
    }

    double h = 0.0;
    int kapn = 0;
    int nu = 0;
    if (q > 1.0) {
        nu = static_cast<int>(3.0 + 1442.0 / (26.0 * std::sqrt(q) + 77.0));
    } else {
        const double r = (1.0 - ys) * std::sqrt(1.0 - q);
        h = 1.88 * r;
        kapn = static_cast<int>(std::lround(7.0 + 34.0 * r));
        nu = static_cast<int>(std::lround(16.0 + 26.0 * r));
    }

    // Backward recursion r_n = 1/2 / (h - iz + (n+1) r_{n+1}); with h > 0 the
    // partial sums s_n = r_n ((2h)^n + s_{n+1}) give the Taylor expansion
    // around z + ih.
    const double h2 = 2.0 * h;
    double lambda = h > 0.0 ? std::pow(h2, kapn) : 0.0;
    const Complex base(h + y, -x);
    Complex r{};
    Complex s{};
    for (int n = nu; n >= 0; --n) {
        r = 0.5 / (base + static_cast<double>(n + 1) * r);
        if (h > 0.0 && n <= kapn) {
            s = r * (lambda + s);
            lambda /= h2;
        }
    }
    Complex w = kTwoOverSqrtPi * (h > 0.0 ? s : r);
    if (y == 0.0) w.real(std::exp(-x * x));
    return w;
}

Complex faddeeva_upper(Complex z) {
    const Complex w = faddeeva_first_quadrant(std::abs(z.real()), z.imag());
    return z.real() < 0.0 ? std::conj(w) : w;
}

}  // namespace

Complex faddeeva_w(Complex z) {
    if (!is_finite(z)) throw Error(ErrorKind::InvalidInput, "faddeeva_w: non-finite argument");
    if (z.imag() >= 0.0) return faddeeva_upper(z);
    return 2.0 * std::exp(-z * z) - faddeeva_upper(-z);
}

Complex plasma_z(Complex z) {
    return Complex(0.0, std::sqrt(std::numbers::pi)) * faddeeva_w(z);
}

FunctionHandle make_plasma_z() {
    return FunctionHandle("plasma_z", [](Complex z) { return plasma_z(z); }, Symmetry::ConjugatePair)
        .with_validated_radius(kPlasmaZValidatedRadius);
}

// ---------------------------------------------------------------------------
// Finite Larmor radius factor

double gamma_flr(int j, double b) {
    if (j != 0 && j != 1) throw Error(ErrorKind::InvalidInput, "gamma_flr: order must be 0 or 1");
    if (!(b >= 0.0) || !std::isfinite(b))
        throw Error(ErrorKind::InvalidInput, "gamma_flr: argument must be finite and >= 0");

    if (b <= 20.0) {
        // I_j(b) = sum_k (b/2)^(2k+j) / (k! (k+j)!)
        const double half = 0.5 * b;
        const double quarter_sq = half * half;
        double term = j == 0 ? 1.0 : half;
        double sum = term;
        for (int k = 1; k < 200; ++k) {
            term *= quarter_sq / (static_cast<double>(k) * static_cast<double>(k + j));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum * std::exp(-b);
    }

    // Hankel asymptotic expansion of I_nu(b) e^-b.
    const double mu = 4.0 * j * j;
    double term = 1.0;
    double sum = 1.0;
    double previous = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * b);
        if (std::abs(term) > previous) break;
        sum += term;
        previous = std::abs(term);
        if (previous < 1e-18 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * b);
}

// ---------------------------------------------------------------------------
// Gyrokinetic determinant

namespace {

struct Species {
    double temperature_ratio;  // T_i_par / T_s_par
    double charge_sign;
    double anisotropy;
    double beta_perp;
    double b;
    double xi_scale;  // xi_s = Omega * xi_scale
};

std::array<Species, 2> species_of(const GyrokineticParams& p) {
    const double beta_i_par = p.beta_i_perp / (1.0 + p.a_i);
    const double beta_e_par = p.tau * beta_i_par;
    const double xi_i_scale = 1.0 / std::sqrt(beta_i_par);
    const Species ion{1.0, 1.0, p.a_i, p.beta_i_perp, p.b_i, xi_i_scale};
    const Species electron{1.0 / p.tau, -1.0, p.a_e, (1.0 + p.a_e) * beta_e_par,
                           p.b_i * p.tau * (1.0 + p.a_e) / ((1.0 + p.a_i) * p.mass_ratio),
                           xi_i_scale / std::sqrt(p.tau * p.mass_ratio)};
    return {ion, electron};
}

// (1 - Gamma_0(b)) / (2b), continuous at b = 0.
double firehose_factor(double b) {
    if (b < 1e-4) return 0.5 - 0.375 * b + (5.0 / 24.0) * b * b;
    return (1.0 - gamma_flr(0, b)) / (2.0 * b);
}

double sigma_k(const GyrokineticParams& p) {
    double sigma = 1.0;
    for (const auto& s : species_of(p)) sigma -= s.beta_perp * s.anisotropy * firehose_factor(s.b);
    return sigma;
}

}  // namespace

void GyrokineticParams::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorKind::InvalidInput, std::string("gyrokinetic: ") + what);
    };
    require(std::isfinite(beta_i_perp) && beta_i_perp > 0.0, "beta_i_perp must be > 0");
    require(std::isfinite(b_i) && b_i >= 0.0, "b_i must be >= 0");
    require(std::isfinite(tau) && tau > 0.0, "tau must be > 0");
    require(std::isfinite(a_i) && a_i > -1.0, "a_i must be > -1 (1 + a_i vanishes)");
    require(std::isfinite(a_e) && a_e > -1.0, "a_e must be > -1 (1 + a_e vanishes)");
    require(std::isfinite(mass_ratio) && mass_ratio > 0.0, "mass_ratio must be > 0");
    require(std::abs(sigma_k(*this)) > 1e-12, "firehose term sigma_k vanishes");
}

GyrokineticCoefficients gyrokinetic_coefficients(const GyrokineticParams& p, Complex omega) {
    GyrokineticCoefficients c{};
    c.beta_i_par = p.beta_i_perp / (1.0 + p.a_i);
    Complex a3_sum{};
    for (const auto& s : species_of(p)) {
        const Complex xi = omega * s.xi_scale;
        const Complex xi_z = xi * plasma_z(xi);
        const double g0 = gamma_flr(0, s.b);
        const double g1 = gamma_flr(1, s.b);
        const double a = s.anisotropy;
        c.q1 -= s.temperature_ratio * ((1.0 + xi_z * g0) + a * (1.0 - g0));
        c.q3 += s.charge_sign * (g0 - g1) / (1.0 + a) * (a - xi_z);
        c.v1 -= (1.0 + a) * s.temperature_ratio * (1.0 - g0);
        c.v3 += s.charge_sign * (g0 - g1);
        a3_sum += s.beta_perp / (1.0 + a) * (g0 - g1) * (xi_z - a);
    }
    c.v2 = sigma_k(p) * (1.0 + p.a_i) * p.b_i;
    c.a3 = -1.0 + a3_sum;
    return c;
}

FunctionHandle make_gyrokinetic(const GyrokineticParams& params) {
    params.validate();
    auto evaluator = [params](Complex omega) {
        const auto c = gyrokinetic_coefficients(params, omega);
        const double half_beta = 0.5 * c.beta_i_par;
        const std::array<std::array<Complex, 3>, 3> m{{
            {c.q1, c.v1, c.q3},
            {c.v1, c.v1 + c.v2 / (omega * omega), c.v3},
            {-half_beta * c.q3, -half_beta * c.v3, c.a3},
        }};
        return det3(m);
    };
    return FunctionHandle("gyrokinetic", std::move(evaluator), Symmetry::ConjugatePair);
}

// ---------------------------------------------------------------------------

namespace examples {

RationalSpec three_zeros_double_pole() {
    RationalSpec spec;
    spec.zeros = {{{0.8, 0.9}, 1}, {{0.7, -0.8}, 1}, {{-0.6, -0.7}, 1}};
    spec.poles = {{{-0.5, 0.6}, 2}};
    return spec;
}

Nlevp3Spec transcendental_3x3() {
    Nlevp3Spec spec;
    spec.a2 = {{{17.6, 1.28, 2.89}, {1.28, 0.824, 0.413}, {2.89, 0.413, 0.725}}};
    spec.a1 = {{{7.66, 2.45, 2.1}, {0.23, 1.04, 0.223}, {0.6, 0.756, 0.658}}};
    spec.a0 = {{{12.1, 18.9, 15.9}, {0.0, 2.7, 0.145}, {11.9, 3.64, 15.5}}};
    return spec;
}

}  // namespace examples

}  // namespace meroloc
