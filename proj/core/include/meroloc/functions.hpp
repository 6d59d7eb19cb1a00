#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "meroloc/errors.hpp"

namespace meroloc {

using Complex = std::complex<double>;

enum class Symmetry {
    None,
    /// Roots come in (z, -conj(z)) pairs.
    ConjugatePair,
};

/// A callable complex function with metadata.
///
/// Handles are cheap to copy; copies share the evaluator and the evaluation
/// counter. A non-finite result is reported as an Overflow error rather than
/// returned. Evaluators must be deterministic.
class FunctionHandle {
public:
    using Evaluator = std::function<Complex(Complex)>;
    /// Produces an independent evaluator instance (e.g. a fresh child process)
    /// for use by another worker thread.
    using Replicator = std::function<Evaluator()>;

    FunctionHandle(std::string name, Evaluator evaluator, Symmetry symmetry = Symmetry::None,
                   Replicator replicator = {});

    Complex operator()(Complex z) const;

    [[nodiscard]] const std::string& name() const noexcept { return state_->name; }
    [[nodiscard]] Symmetry symmetry() const noexcept { return state_->symmetry; }
    [[nodiscard]] std::uint64_t evaluation_count() const noexcept;
    [[nodiscard]] bool accuracy_degraded() const noexcept;
    void flag_accuracy_degraded() const noexcept;

    /// Handle for another worker. Shares name, symmetry and counter; gets its
    /// own evaluator when the handle was built with a replicator.
    [[nodiscard]] FunctionHandle replicate() const;

    /// Copy that raises the accuracy-degraded flag when evaluated at
    /// |z| > radius.
    [[nodiscard]] FunctionHandle with_validated_radius(double radius) const;

private:
    struct Shared {
        std::atomic<std::uint64_t> count{0};
        std::atomic<bool> degraded{false};
    };
    struct State {
        std::string name;
        Evaluator evaluator;
        Symmetry symmetry = Symmetry::None;
        Replicator replicator;
        double validated_radius = std::numeric_limits<double>::infinity();
        std::shared_ptr<Shared> shared;
    };
    explicit FunctionHandle(std::shared_ptr<const State> state) : state_(std::move(state)) {}

    std::shared_ptr<const State> state_;
};

// ---------------------------------------------------------------------------
// Rational functions

struct RootSpec {
    Complex location;
    int multiplicity = 1;
};

struct RationalSpec {
    std::vector<RootSpec> zeros;
    std::vector<RootSpec> poles;

    /// Throws InvalidInput on non-positive multiplicities or coincident locations.
    void validate() const;
};

/// prod (z - z_i)^m_i / prod (z - p_j)^k_j evaluated in factored form.
FunctionHandle make_rational(const RationalSpec& spec);

// ---------------------------------------------------------------------------
// 3x3 transcendental eigenvalue problem det((e^z - 1) A2 + z^2 A1 - A0)

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct Nlevp3Spec {
    Matrix3 a0{};
    Matrix3 a1{};
    Matrix3 a2{};

    void validate() const;
};

FunctionHandle make_nlevp3(const Nlevp3Spec& spec);

/// Cofactor expansion of a complex 3x3 determinant.
Complex det3(const std::array<std::array<Complex, 3>, 3>& m);

// ---------------------------------------------------------------------------
// Plasma dispersion function and finite Larmor radius factors

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
Complex faddeeva_w(Complex z);

/// Largest |z| for which plasma_z is validated to 1e-12 relative accuracy.
inline constexpr double kPlasmaZValidatedRadius = 20.0;

/// Plasma dispersion function Z(z) = i sqrt(pi) w(z).
Complex plasma_z(Complex z);

FunctionHandle make_plasma_z();

/// Gamma_j(b) = I_j(b) exp(-b) for j in {0, 1}, b >= 0.
double gamma_flr(int j, double b);

// ---------------------------------------------------------------------------
// Gyrokinetic dispersion determinant for a bi-Maxwellian ion/electron plasma.
//
// Conventions (s = i, e; equal densities; q_i = -q_e):
//   a_s = T_s_perp / T_s_par - 1, so T_s_perp = (1 + a_s) T_s_par
//   beta_i_par = beta_i_perp / (1 + a_i)
//   beta_e_par = tau beta_i_par,  beta_e_perp = (1 + a_e) beta_e_par
//     (beta_s = 8 pi N0 T_s / B^2, tau = T_e_par / T_i_par)
//   xi_i = Omega / sqrt(beta_i_par)
//     (v_ti_par^2 = 2 T_i_par / m_i = beta_i_par v_A^2)
//   xi_e = xi_i / sqrt(tau * m_i/m_e)
//     (v_te_par / v_ti_par = sqrt(tau m_i / m_e))
//   b_e = b_i * tau (1 + a_e) / ((1 + a_i) m_i/m_e)
//     (b_s ~ T_s_perp m_s at fixed k_perp and B)
//   T_i_par / T_s_par = 1 (ions), 1/tau (electrons)
//
// The determinant is taken over the 3x3 system acting on
// (Phi_par, Psi, B_par):
//   [ Q1                 V1                 Q3 ]
//   [ V1                 V1 + V2 / Omega^2  V3 ]
//   [ -beta_i_par Q3 / 2 -beta_i_par V3 / 2 A3 ]

struct GyrokineticParams {
    double beta_i_perp = 1.0;
    double b_i = 0.1;
    double tau = 10.0;
    double a_i = 0.0;
    double a_e = 0.0;
    double mass_ratio = 1836.0;

    void validate() const;
};

struct GyrokineticCoefficients {
    Complex q1, q3, v1, v2, v3, a3;
    double beta_i_par = 0.0;
};

GyrokineticCoefficients gyrokinetic_coefficients(const GyrokineticParams& params, Complex omega);

FunctionHandle make_gyrokinetic(const GyrokineticParams& params);

// ---------------------------------------------------------------------------
// External evaluator speaking the newline-delimited JSON protocol on the
// child's stdin/stdout:
//   request:  {"id": <int>, "z": [<re>, <im>]}
//   response: {"id": <int>, "f": [<re>, <im>]}  or  {"id": <int>, "error": "<msg>"}

struct ExternalCommand {
    std::vector<std::string> argv;
    std::chrono::milliseconds timeout{30000};
};

/// Spawns the child lazily on first evaluation. Each replicated handle owns
/// its own child process.
FunctionHandle external_function(const ExternalCommand& command);

// ---------------------------------------------------------------------------
// Built-in reference problems.

namespace examples {

/// Three simple zeros (0.8+0.9i, 0.7-0.8i, -0.6-0.7i) and a double pole at
/// -0.5+0.6i.
RationalSpec three_zeros_double_pole();

/// Matrices of the 3x3 transcendental eigenvalue test problem.
Nlevp3Spec transcendental_3x3();

}  // namespace examples

}  // namespace meroloc
