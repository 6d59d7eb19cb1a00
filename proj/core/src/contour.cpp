#include "meroloc/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace meroloc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kJumpLimit = 0.5 * kPi;
constexpr double kRoundoff = std::numeric_limits<double>::epsilon();

// 7-point Gauss / 15-point Kronrod pair on [-1, 1]. Abscissae in decreasing
// order; the odd entries (1, 3, 5, 7) are the Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kNodes = 15;

// Node j of a panel maps to abscissa sign * kXgk[index].
struct NodeRule {
    double x;
    double wk;
    double wg;
};

constexpr std::array<NodeRule, kNodes> make_rule() {
    std::array<NodeRule, kNodes> rule{};
    for (int j = 0; j < 7; ++j) {
        const double wg = (j % 2 == 1) ? kWg[j / 2] : 0.0;
        rule[j] = {-kXgk[j], kWgk[j], wg};
        rule[kNodes - 1 - j] = {kXgk[j], kWgk[j], wg};
    }
    rule[7] = {0.0, kWgk[7], kWg[3]};
    return rule;
}

constexpr std::array<NodeRule, kNodes> kRule = make_rule();

double principal(double d) { return std::remainder(d, kTwoPi); }

}  // namespace

ContourIntegrator::ContourIntegrator(FunctionHandle handle, const Rectangle& rect, ContourOptions options)
    : handle_(std::move(handle)), rect_(rect), map_(options.map_rect.value_or(rect)), options_(options) {
    rect_.validate();
    map_.validate();
    if (options_.max_depth < 1) throw Error(ErrorKind::InvalidInput, "contour: max_depth must be >= 1");
    if (options_.initial_panels < 1) throw Error(ErrorKind::InvalidInput, "contour: initial_panels must be >= 1");
    if (options_.eval_budget == 0) throw Error(ErrorKind::InvalidInput, "contour: eval_budget must be > 0");
    corners_ = rect_.vertices();
}

ContourIntegrator::Sample ContourIntegrator::evaluate(int edge, double t) {
    if (evaluations_ >= options_.eval_budget)
        throw ToleranceNotMetError("contour: evaluation budget of " + std::to_string(options_.eval_budget) +
                                       " exhausted while sampling the boundary",
                                   std::numeric_limits<double>::infinity());
    Sample s;
    if (t == 0.0) {
        s.z = corners_[edge];
    } else if (t == 1.0) {
        s.z = corners_[(edge + 1) % 4];
    } else {
        const Complex p = corners_[edge];
        s.z = p + t * (corners_[(edge + 1) % 4] - p);
    }
    ++evaluations_;
    try {
        s.f = handle_(s.z);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Overflow)
            throw Error(ErrorKind::BoundaryProximity, "contour: f overflows on the boundary: " + std::string(e.what()));
        throw;
    }
    const double mag = std::abs(s.f);
    if (!(mag > 0.0) || !std::isfinite(mag))
        throw Error(ErrorKind::BoundaryProximity, "contour: |f| underflows or overflows on the boundary at z = (" +
                                                      std::to_string(s.z.real()) + ", " + std::to_string(s.z.imag()) +
                                                      ")");
    s.log_abs = std::log(mag);
    s.arg = std::arg(s.f);
    s.zeta = to_annulus(map_, s.z);
    return s;
}

void ContourIntegrator::insert(int edge, double t) {
    auto& samples = edges_[edge];
    if (samples.contains(t)) return;
    samples.emplace(t, evaluate(edge, t));
    trace_valid_ = false;
}

void ContourIntegrator::add_panel_nodes(const Panel& panel) {
    const double mid = 0.5 * (panel.a + panel.b);
    const double half = 0.5 * (panel.b - panel.a);
    insert(panel.edge, panel.a);
    insert(panel.edge, panel.b);
    for (const auto& node : kRule) insert(panel.edge, node.x == 0.0 ? mid : mid + half * node.x);
}

void ContourIntegrator::initialise() {
    if (initialised_) return;
    const std::array<double, 4> lengths = {rect_.height, rect_.length, rect_.height, rect_.length};
    const double longest = std::max(rect_.height, rect_.length);

    for (int e = 0; e < 4; ++e) {
        const Sample corner = evaluate(e, 0.0);
        edges_[e].emplace(0.0, corner);
        edges_[(e + 3) % 4].emplace(1.0, corner);
    }
    for (int e = 0; e < 4; ++e) {
        const int n = std::max(4, static_cast<int>(std::ceil(options_.initial_panels * lengths[e] / longest)));
        for (int i = 0; i < n; ++i) {
            const Panel panel{e, static_cast<double>(i) / n, static_cast<double>(i + 1) / n};
            panels_.push_back(panel);
            add_panel_nodes(panel);
        }
    }
    min_width_ = std::ldexp(1.0 / options_.initial_panels, -options_.max_depth);
    initialised_ = true;
    ensure_continuity();
}

void ContourIntegrator::unwrap() {
    double theta = 0.0;
    double prev_arg = 0.0;
    bool first = true;
    for (int e = 0; e < 4; ++e) {
        for (auto it = edges_[e].begin(); it != edges_[e].end(); ++it) {
            Sample& s = it->second;
            if (e > 0 && it == edges_[e].begin()) {
                s.theta = theta;  // shared corner, already visited as the end of edge e-1
                continue;
            }
            theta = first ? s.arg : theta + principal(s.arg - prev_arg);
            first = false;
            prev_arg = s.arg;
            s.theta = theta;
        }
    }
}

void ContourIntegrator::ensure_continuity() {
    for (;;) {
        unwrap();
        std::vector<std::pair<int, double>> pending;
        for (int e = 0; e < 4; ++e) {
            const auto& samples = edges_[e];
            for (auto it = samples.begin(), next = std::next(it); next != samples.end(); ++it, ++next) {
                if (std::abs(next->second.theta - it->second.theta) < kJumpLimit) continue;
                if (next->first - it->first <= min_width_)
                    throw Error(ErrorKind::BoundaryProximity,
                                "contour: argument jump of " + std::to_string(next->second.theta - it->second.theta) +
                                    " rad persists near z = (" + std::to_string(it->second.z.real()) + ", " +
                                    std::to_string(it->second.z.imag()) + "); root on or near the boundary");
                pending.emplace_back(e, 0.5 * (it->first + next->first));
            }
        }
        if (pending.empty()) return;
        for (const auto& [e, t] : pending) insert(e, t);
    }
}

const BoundaryTrace& ContourIntegrator::trace() {
    initialise();
    if (trace_valid_) return trace_;
    ensure_continuity();
    trace_ = {};
    for (int e = 0; e < 4; ++e) {
        for (auto it = edges_[e].begin(); it != edges_[e].end(); ++it) {
            if (e > 0 && it == edges_[e].begin()) continue;
            trace_.points.push_back(it->second.z);
            trace_.f_values.push_back(it->second.f);
            trace_.theta.push_back(it->second.theta);
            trace_.log_abs.push_back(it->second.log_abs);
        }
    }
    winding_ = winding_number(trace_);
    trace_valid_ = true;
    return trace_;
}

int ContourIntegrator::winding() {
    trace();
    return winding_;
}

MomentVector ContourIntegrator::moments(std::size_t count, double eps) {
    if (count < 1) throw Error(ErrorKind::InvalidInput, "moments: at least one moment is required");
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "moments: eps_i must be > 0");

    const double span = map_.angular_span();
    const Complex rotation = std::polar(1.0, -map_.alpha);
    std::array<Complex, 4> edge_factor;
    for (int e = 0; e < 4; ++e)
        edge_factor[e] = span * rotation * (corners_[(e + 1) % 4] - corners_[e]) / (kTwoPi * map_.length);

    const std::size_t nk = count - 1;  // moments 1..count-1 need quadrature
    std::vector<Complex> totals(nk);
    std::vector<double> total_err(nk);
    std::vector<double> panel_err;
    std::vector<Complex> kron(nk), gauss(nk);
    std::vector<double> magnitude(nk);

    double achieved = 0.0;
    for (;;) {
        trace();
        const Sample& start = edges_[0].begin()->second;
        const Complex shift{start.log_abs, start.theta};

        std::fill(totals.begin(), totals.end(), Complex{});
        std::fill(total_err.begin(), total_err.end(), 0.0);
        panel_err.assign(panels_.size(), 0.0);

        for (std::size_t p = 0; p < panels_.size() && nk > 0; ++p) {
            const Panel& panel = panels_[p];
            const double mid = 0.5 * (panel.a + panel.b);
            const double half = 0.5 * (panel.b - panel.a);
            std::fill(kron.begin(), kron.end(), Complex{});
            std::fill(gauss.begin(), gauss.end(), Complex{});
            std::fill(magnitude.begin(), magnitude.end(), 0.0);
            for (const auto& node : kRule) {
                const Sample& s = edges_[panel.edge].at(node.x == 0.0 ? mid : mid + half * node.x);
                const Complex lnf = Complex{s.log_abs, s.theta} - shift;
                Complex power = s.zeta * lnf;
                for (std::size_t k = 0; k < nk; ++k) {
                    kron[k] += node.wk * power;
                    gauss[k] += node.wg * power;
                    magnitude[k] += node.wk * std::abs(power);
                    power *= s.zeta;
                }
            }
            const double scale = std::abs(edge_factor[panel.edge]) * half;
            for (std::size_t k = 0; k < nk; ++k) {
                const double order = static_cast<double>(k + 1);
                totals[k] += edge_factor[panel.edge] * order * half * kron[k];
                const double err = scale * order *
                                   std::max(std::abs(kron[k] - gauss[k]), 50.0 * kRoundoff * magnitude[k]);
                total_err[k] += err;
                panel_err[p] = std::max(panel_err[p], err);
            }
        }

        achieved = nk == 0 ? 0.0 : *std::max_element(total_err.begin(), total_err.end());
        if (achieved <= eps) break;

        std::vector<std::size_t> order(panels_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return panel_err[x] > panel_err[y]; });
        double remaining = std::accumulate(panel_err.begin(), panel_err.end(), 0.0);
        std::vector<std::size_t> split;
        for (std::size_t idx : order) {
            if (!split.empty() && remaining <= 0.5 * eps) break;
            split.push_back(idx);
            remaining -= panel_err[idx];
        }

        if (evaluations_ + 2 * kNodes * split.size() > options_.eval_budget)
            throw ToleranceNotMetError("contour: evaluation budget of " + std::to_string(options_.eval_budget) +
                                           " exhausted; achieved moment error " + std::to_string(achieved),
                                       achieved);

        std::vector<Panel> children;
        for (std::size_t idx : split) {
            const Panel panel = panels_[idx];
            const double mid = 0.5 * (panel.a + panel.b);
            if (!(mid > panel.a && mid < panel.b) || panel.b - panel.a < 64.0 * kRoundoff)
                throw ToleranceNotMetError("contour: quadrature panel cannot be refined further; achieved moment error " +
                                               std::to_string(achieved),
                                           achieved);
            panels_[idx] = {panel.edge, panel.a, mid};
            children.push_back({panel.edge, mid, panel.b});
        }
        for (const Panel& child : children) panels_.push_back(child);
        for (std::size_t idx : split) add_panel_nodes(panels_[idx]);
        for (const Panel& child : children) add_panel_nodes(child);
    }

    MomentVector out;
    out.winding = winding_;
    out.eps_i = achieved;
    out.requested_eps = eps;
    out.zeta_start = to_annulus(map_, corners_[0]);
    out.evaluations = evaluations_;
    out.values.resize(count);
    out.values[0] = Complex(static_cast<double>(winding_), 0.0);
    Complex boundary = out.zeta_start;
    for (std::size_t k = 0; k < nk; ++k) {
        out.values[k + 1] = boundary * static_cast<double>(winding_) + totals[k];
        boundary *= out.zeta_start;
    }
    for (const auto& v : out.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorKind::Overflow, "moments: non-finite moment value");
    return out;
}

BoundaryTrace trace_argument(const FunctionHandle& handle, const Rectangle& rect, int max_depth) {
    ContourOptions options;
    options.max_depth = max_depth;
    ContourIntegrator integrator(handle, rect, options);
    return integrator.trace();
}

int winding_number(const BoundaryTrace& trace) {
    if (trace.theta.size() < 2) throw Error(ErrorKind::InconsistentTrace, "winding_number: trace has fewer than two samples");
    const double turns = (trace.theta.back() - trace.theta.front()) / kTwoPi;
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.25)
        throw Error(ErrorKind::InconsistentTrace,
                    "winding_number: argument change of " + std::to_string(turns) + " turns is not near an integer");
    return static_cast<int>(rounded);
}

MomentVector moments(const FunctionHandle& handle, const Rectangle& rect, std::size_t k, double eps_i,
                     const ContourOptions& options) {
    if (k < 1) throw Error(ErrorKind::InvalidInput, "moments: K must be >= 1");
    ContourIntegrator integrator(handle, rect, options);
    return integrator.moments(2 * k, eps_i);
}

}  // namespace meroloc
