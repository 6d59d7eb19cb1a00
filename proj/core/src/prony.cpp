#include "meroloc/prony.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace meroloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Complex> finite_eigenvalues(const linalg::ComplexMatrix& h1, const linalg::ComplexMatrix& h0) {
    linalg::EigOptions options;
    options.compute_vectors = false;
    std::vector<linalg::GeneralizedEigenvalue> eig;
    try {
        eig = linalg::generalized_eig(h1, h0, options);
    } catch (const linalg::ConvergenceError& e) {
        eig = e.partial();
    }
    std::vector<Complex> out;
    for (const auto& ev : eig) {
        if (!ev.finite()) continue;
        const Complex v = ev.value();
        if (std::isfinite(v.real()) && std::isfinite(v.imag())) out.push_back(v);
    }
    return out;
}

}  // namespace

linalg::ComplexMatrix hankel(const MomentVector& moments, std::size_t n, int shift) {
    if (shift != 0 && shift != 1) throw Error(ErrorKind::InvalidInput, "hankel: shift must be 0 or 1");
    if (n == 0) throw Error(ErrorKind::InvalidInput, "hankel: size must be >= 1");
    const std::size_t need = 2 * n - 1 + static_cast<std::size_t>(shift);
    if (need > moments.values.size())
        throw Error(ErrorKind::InvalidInput, "hankel: size " + std::to_string(n) + " with shift " +
                                                 std::to_string(shift) + " needs " + std::to_string(need) +
                                                 " moments, have " + std::to_string(moments.values.size()));
    linalg::ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = moments.values[i + j + static_cast<std::size_t>(shift)];
    return h;
}

double rank_tolerance(const MomentVector& moments, std::size_t k) {
    return 10.0 * std::max(moments.requested_eps, moments.eps_i) * std::sqrt(static_cast<double>(k));
}

std::size_t count_roots(const MomentVector& moments, std::size_t n_max, std::optional<double> rank_tol) {
    std::vector<std::size_t> ranks;  // ranks[k - 1] = rank of the k x k matrix
    auto rank_of = [&](std::size_t k) {
        while (ranks.size() < k) {
            const std::size_t size = ranks.size() + 1;
            const auto sigma = linalg::singular_values(hankel(moments, size, 0));
            const double sigma_max = sigma.empty() ? 0.0 : sigma.front();
            const double tol = std::max(rank_tol.value_or(rank_tolerance(moments, size)), 1e-13 * sigma_max);
            ranks.push_back(static_cast<std::size_t>(
                std::count_if(sigma.begin(), sigma.end(), [tol](double s) { return s > tol; })));
        }
        return ranks[k - 1];
    };
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (2 * (n + 2) - 1 > moments.values.size()) break;
        if (rank_of(n + 1) == n && rank_of(n + 2) == n) return n;
    }
    return n_max + 1;
}

std::vector<Complex> solve_pencil(const MomentVector& moments, std::size_t n) {
    if (n == 0) throw Error(ErrorKind::InvalidInput, "solve_pencil: N must be >= 1");
    auto values = finite_eigenvalues(hankel(moments, n, 1), hankel(moments, n, 0));
    if (values.size() < n)
        throw Error(ErrorKind::DegeneratePencil, "solve_pencil: only " + std::to_string(values.size()) + " of " +
                                                     std::to_string(n) + " eigenvalues are finite");
    return values;
}

double estimate_condition(std::span<const Complex> zetas) {
    const std::size_t n = zetas.size();
    if (n == 0) throw Error(ErrorKind::InvalidInput, "estimate_condition: no roots");
    if (n == 1) return 1.0;

    double r_plus = 0.0;
    double r_minus = kInf;
    for (const auto& z : zetas) {
        r_plus = std::max(r_plus, std::abs(z));
        r_minus = std::min(r_minus, std::abs(z));
    }
    if (!(r_minus > 0.0)) return kInf;

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Complex ui = std::polar(1.0, std::arg(zetas[i]));
        double product = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (std::abs(zetas[i] - zetas[j]) < 1e-14) return kInf;
            const double gap = std::abs(ui - std::polar(1.0, std::arg(zetas[j])));
            if (gap == 0.0) return kInf;
            product /= gap * gap;
        }
        worst = std::max(worst, product);
    }
    const double e = 2.0 * static_cast<double>(n - 1);
    const double nn = static_cast<double>(n);
    return nn * nn * std::pow(r_plus / r_minus, e) * std::pow(1.0 + r_plus, e) * worst;
}

ErrorEstimate estimate_errors(const MomentVector& moments, std::size_t n, std::span<const Complex> zetas) {
    if (zetas.size() != n) throw Error(ErrorKind::InvalidInput, "estimate_errors: zetas must have N entries");
    const auto enlarged = finite_eigenvalues(hankel(moments, n + 1, 1), hankel(moments, n + 1, 0));

    ErrorEstimate out;
    if (enlarged.size() < n) {
        const double bound = std::max(moments.requested_eps, moments.eps_i) * estimate_condition(zetas);
        out.deltas.assign(n, bound);
        out.available = false;
        return out;
    }

    out.deltas.assign(n, kInf);
    std::vector<bool> root_used(n, false);
    std::vector<bool> eig_used(enlarged.size(), false);
    for (std::size_t step = 0; step < n; ++step) {
        double best = kInf;
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (root_used[i]) continue;
            for (std::size_t j = 0; j < enlarged.size(); ++j) {
                if (eig_used[j]) continue;
                const double d = std::abs(zetas[i] - enlarged[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        root_used[bi] = true;
        eig_used[bj] = true;
        out.deltas[bi] = 0.5 * best;
    }
    return out;
}

MultiplicityFit multiplicities(const MomentVector& moments, std::span<const Complex> zetas) {
    const std::size_t n = zetas.size();
    if (n == 0) throw Error(ErrorKind::InvalidInput, "multiplicities: no roots");
    const std::size_t count = std::min(moments.values.size(), std::max<std::size_t>(2 * n, 4));
    if (count < n) throw Error(ErrorKind::InvalidInput, "multiplicities: not enough moments");

    const auto solution =
        linalg::vandermonde_solve(zetas, std::span<const Complex>(moments.values.data(), count));

    MultiplicityFit fit;
    fit.weights = solution.weights;
    fit.residual = solution.residual;
    long sum = 0;
    for (const auto& w : solution.weights) {
        const double rounded = std::round(w.real());
        if (std::abs(w.real() - rounded) > 0.25 || std::abs(w.imag()) > 0.25 || rounded == 0.0)
            throw Error(ErrorKind::MultiplicityInconsistency,
                        "multiplicities: weight (" + std::to_string(w.real()) + ", " + std::to_string(w.imag()) +
                            ") is not a nonzero integer");
        fit.values.push_back(static_cast<int>(rounded));
        sum += static_cast<long>(rounded);
    }
    if (sum != moments.winding)
        throw Error(ErrorKind::MultiplicityInconsistency, "multiplicities: sum " + std::to_string(sum) +
                                                              " differs from winding number " +
                                                              std::to_string(moments.winding));
    return fit;
}

PronyResult analyse(const MomentVector& moments, std::size_t n) {
    PronyResult result;
    result.zetas = solve_pencil(moments, n);
    result.kappa_sq = estimate_condition(result.zetas);
    result.r_plus = 0.0;
    result.r_minus = kInf;
    for (const auto& z : result.zetas) {
        result.r_plus = std::max(result.r_plus, std::abs(z));
        result.r_minus = std::min(result.r_minus, std::abs(z));
    }
    const auto errors = estimate_errors(moments, n, result.zetas);
    result.deltas = errors.deltas;
    result.error_estimate_available = errors.available;
    auto fit = multiplicities(moments, result.zetas);
    result.multiplicities = std::move(fit.values);
    result.vandermonde_residual = fit.residual;
    return result;
}

}  // namespace meroloc
