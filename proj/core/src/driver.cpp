#include "meroloc/driver.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>

namespace meroloc {

namespace {

constexpr double kTolRadius = 0.02;
constexpr double kAspectLimit = 0.1;
constexpr std::size_t kInitialMoments = 16;
constexpr int kTraceDepth = 40;
constexpr int kMaxJitterAttempt = 3;

/// Half-open box in rotated coordinates deciding which region reports a
/// root. Sibling boxes share cut lines; a root within `snap` of a cut is
/// treated as lying on it and belongs to the upper side.
struct Ownership {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    bool x_hi_closed = true;
    bool y_hi_closed = true;

    [[nodiscard]] bool owns(Complex w, double snap) const {
        const bool in_x = w.real() >= x_lo - snap && (x_hi_closed ? w.real() <= x_hi + snap : w.real() < x_hi - snap);
        const bool in_y = w.imag() >= y_lo - snap && (y_hi_closed ? w.imag() <= y_hi + snap : w.imag() < y_hi - snap);
        return in_x && in_y;
    }
};

struct Task {
    Rectangle rect;
    Ownership own;
    int depth = 0;
    std::string path;
};

struct Outcome {
    RegionDiagnostics node;
    std::vector<RootReport> roots;
    std::vector<Task> children;
    std::vector<std::string> child_paths;
};

struct Context {
    SearchConfig config;
    double snap_floor = 0.0;
};

bool retryable(ErrorKind kind) {
    return kind == ErrorKind::BoundaryProximity || kind == ErrorKind::Overflow ||
           kind == ErrorKind::InconsistentTrace;
}

class RegionSolver {
public:
    RegionSolver(const FunctionHandle& handle, const Task& task, const Context& ctx)
        : handle_(handle), task_(task), ctx_(ctx) {
        out_.node.path = task.path;
        out_.node.rect = task.rect;
        out_.node.work_rect = task.rect;
        out_.node.depth = task.depth;
    }

    Outcome run() {
        for (int attempt = 0;; ++attempt) {
            Rectangle work = task_.rect;
            if (attempt > 0) {
                try {
                    work = jitter_retry(task_.rect, attempt - 1, ctx_.config);
                } catch (const Error& e) {
                    out_.node.status = RegionStatus::BoundaryRoot;
                    out_.node.reason = std::string(e.what()) + "; last failure: " + last_failure_;
                    return std::move(out_);
                }
            }
            out_.node.jitter_attempts = attempt;
            out_.node.work_rect = work;
            try {
                solve(work);
                return std::move(out_);
            } catch (const Error& e) {
                if (!retryable(e.kind())) throw;
                last_failure_ = e.what();
                out_.node.warnings.push_back(std::string(to_string(e.kind())) + ": " + e.what());
                reset();
            }
        }
    }

private:
    void reset() {
        out_.roots.clear();
        out_.children.clear();
        out_.child_paths.clear();
        out_.node.winding.reset();
        out_.node.root_count.reset();
        out_.node.kappa_sq.reset();
        out_.node.achieved_eps.reset();
        out_.node.status = RegionStatus::Accepted;
        out_.node.reason.clear();
    }

    void solve(const Rectangle& work) {
        const SearchConfig& cfg = ctx_.config;
        ContourOptions options;
        options.max_depth = kTraceDepth;
        options.eval_budget = cfg.eval_budget;
        ContourIntegrator integrator(handle_, work, options);

        MomentVector mom;
        try {
            out_.node.winding = integrator.winding();
            mom = integrator.moments(kInitialMoments, cfg.eps_i);
        } catch (const ToleranceNotMetError& e) {
            out_.node.evaluations += integrator.evaluations();
            out_.node.achieved_eps = e.achieved();
            subdivide(work, "tolerance-not-met", nullptr);
            return;
        } catch (const Error&) {
            out_.node.evaluations += integrator.evaluations();
            throw;
        }

        const std::size_t first_cap = std::min(cfg.n_max_region, (kInitialMoments - 3) / 2);
        std::size_t n = count_roots(mom, first_cap, cfg.rank_tol);
        if (n > first_cap && cfg.n_max_region > first_cap) {
            try {
                mom = integrator.moments(2 * cfg.n_max_region + 3, cfg.eps_i);
            } catch (const ToleranceNotMetError& e) {
                out_.node.evaluations += integrator.evaluations();
                out_.node.achieved_eps = e.achieved();
                subdivide(work, "tolerance-not-met", nullptr);
                return;
            }
            n = count_roots(mom, cfg.n_max_region, cfg.rank_tol);
        }
        out_.node.evaluations += integrator.evaluations();
        out_.node.achieved_eps = mom.eps_i;

        if (n > cfg.n_max_region) return subdivide(work, "root-count-unstable", &mom);
        out_.node.root_count = n;
        if (n == 0) {
            if (mom.winding == 0) {
                out_.node.status = RegionStatus::Empty;
                return;
            }
            return subdivide(work, "count-winding-mismatch", &mom);
        }
        if (work.inner_radius() < kAspectLimit) return subdivide(work, "aspect-ratio", &mom);

        std::vector<Complex> zetas;
        try {
            zetas = solve_pencil(mom, n);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegeneratePencil) throw;
            return subdivide(work, "degenerate-pencil", &mom);
        }
        const double kappa = estimate_condition(zetas);
        out_.node.kappa_sq = kappa;
        if (!(kappa <= cfg.kappa_c_sq)) return subdivide(work, "conditioning", &mom);

        const ErrorEstimate errors = estimate_errors(mom, n, zetas);
        if (!errors.available) out_.node.warnings.push_back("error estimate unavailable; using eps_i * kappa_sq");
        MultiplicityFit fit;
        try {
            fit = multiplicities(mom, zetas);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::MultiplicityInconsistency) throw;
            return subdivide(work, "multiplicity-inconsistency", &mom);
        }

        std::vector<RootReport> found;
        for (std::size_t j = 0; j < n; ++j) {
            const double radius = std::abs(zetas[j]);
            if (radius > 1.0 + kTolRadius) return subdivide(work, "root-outside-annulus", &mom);
            Complex z;
            try {
                z = from_annulus(work, zetas[j]);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::BranchCut) throw;
                return subdivide(work, "root-in-slot", &mom);
            }
            const double err = errors.deltas[j] * inverse_map_scale(work, zetas[j]);
            if (!std::isfinite(err)) return subdivide(work, "error-estimate-not-finite", &mom);
            if (!contains(work, z, err)) {
                if (radius > 1.0) {
                    out_.node.warnings.push_back("dropped root outside the region at (" + std::to_string(z.real()) +
                                                 ", " + std::to_string(z.imag()) + ")");
                    continue;
                }
                return subdivide(work, "root-outside-rectangle", &mom);
            }
            found.push_back({z, fit.values[j], err, task_.path, kappa, false});
        }
        for (auto& report : found) keep_if_owned(report);
        out_.node.status = RegionStatus::Accepted;
    }

    void keep_if_owned(const RootReport& report) {
        const Complex w = task_.rect.to_rotated(report.location);
        const double snap = std::max(ctx_.snap_floor, 10.0 * report.error_estimate);
        if (task_.own.owns(w, snap)) out_.roots.push_back(report);
    }

    void subdivide(const Rectangle& work, const std::string& reason, const MomentVector* mom) {
        out_.node.reason = reason;
        if (task_.depth >= ctx_.config.max_depth) {
            out_.node.status = RegionStatus::Unresolved;
            if (mom != nullptr && mom->winding != 0) report_cluster(work, *mom);
            return;
        }
        out_.node.status = RegionStatus::Subdivided;
        const bool split_height = work.inner_radius() < kAspectLimit;
        const auto halves = split_height ? bisect_height(work) : bisect_length(work);
        const char axis = split_height ? 'H' : 'L';
        for (int side = 0; side < 2; ++side) {
            Task child;
            child.rect = halves[side];
            child.depth = task_.depth + 1;
            child.path = task_.path + axis + static_cast<char>('0' + side);
            child.own = task_.own;
            if (split_height) {
                const double cut = work.z0.imag() - 0.5 * work.height;
                if (side == 0) {
                    child.own.y_hi = cut;
                    child.own.y_hi_closed = false;
                } else {
                    child.own.y_lo = cut;
                }
            } else {
                const double cut = work.z0.real();
                if (side == 0) {
                    child.own.x_hi = cut;
                    child.own.x_hi_closed = false;
                } else {
                    child.own.x_lo = cut;
                }
            }
            out_.child_paths.push_back(child.path);
            out_.children.push_back(std::move(child));
        }
    }

    void report_cluster(const Rectangle& work, const MomentVector& mom) {
        if (mom.values.size() < 2) return;
        const Complex centroid = mom.values[1] / static_cast<double>(mom.winding);
        Complex z;
        try {
            z = from_annulus(work, centroid);
        } catch (const Error&) {
            return;
        }
        if (!contains(work, z, 0.0)) return;
        const double err = 0.5 * std::hypot(work.length, work.height);
        RootReport report{z, mom.winding, err, task_.path, out_.node.kappa_sq.value_or(
                                                              std::numeric_limits<double>::infinity()),
                          true};
        keep_if_owned(report);
        out_.node.warnings.push_back("cluster centroid reported at maximum depth");
    }

    const FunctionHandle& handle_;
    const Task& task_;
    const Context& ctx_;
    Outcome out_;
    std::string last_failure_;
};

/// Work queue of regions drained by a fixed set of threads.
class Scheduler {
public:
    Scheduler(const FunctionHandle& handle, const Context& ctx) : handle_(handle), ctx_(ctx) {}

    void run(Task root) {
        queue_.push_back(std::move(root));
        const unsigned workers = std::max(1u, ctx_.config.workers);
        if (workers == 1) {
            work(handle_);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(workers);
            for (unsigned i = 0; i < workers; ++i)
                threads.emplace_back([this, h = handle_.replicate()] { work(h); });
            for (auto& t : threads) t.join();
        }
        if (failure_) std::rethrow_exception(failure_);
    }

    std::map<std::string, Outcome>& outcomes() { return outcomes_; }

private:
    void work(const FunctionHandle& handle) {
        for (;;) {
            Task task;
            {
                std::unique_lock lock(mutex_);
                ready_.wait(lock, [this] { return failure_ || !queue_.empty() || active_ == 0; });
                if (failure_ || queue_.empty()) return;
                task = std::move(queue_.front());
                queue_.pop_front();
                ++active_;
            }
            Outcome outcome;
            std::exception_ptr error;
            try {
                outcome = RegionSolver(handle, task, ctx_).run();
            } catch (...) {
                error = std::current_exception();
            }
            {
                std::lock_guard lock(mutex_);
                --active_;
                if (error) {
                    if (!failure_) failure_ = error;
                } else {
                    for (auto& child : outcome.children) queue_.push_back(std::move(child));
                    outcome.children.clear();
                    outcomes_.emplace(task.path, std::move(outcome));
                }
            }
            ready_.notify_all();
        }
    }

    const FunctionHandle& handle_;
    const Context& ctx_;
    std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<Task> queue_;
    std::size_t active_ = 0;
    std::exception_ptr failure_;
    std::map<std::string, Outcome> outcomes_;
};

RegionDiagnostics assemble(std::map<std::string, Outcome>& outcomes, const std::string& path,
                           std::vector<RootReport>& roots, std::uint64_t& evaluations) {
    Outcome& outcome = outcomes.at(path);
    RegionDiagnostics node = std::move(outcome.node);
    evaluations += node.evaluations;
    node.owned_winding = 0;
    for (auto& r : outcome.roots) {
        node.owned_winding += r.multiplicity;
        roots.push_back(std::move(r));
    }
    for (const auto& child : outcome.child_paths) {
        node.children.push_back(assemble(outcomes, child, roots, evaluations));
        node.owned_winding += node.children.back().owned_winding;
    }
    return node;
}

void collect_unresolved(const RegionDiagnostics& node, std::vector<const RegionDiagnostics*>& out) {
    if (node.status == RegionStatus::Unresolved || node.status == RegionStatus::BoundaryRoot) out.push_back(&node);
    for (const auto& child : node.children) collect_unresolved(child, out);
}

}  // namespace

std::string_view to_string(RegionStatus status) noexcept {
    switch (status) {
        case RegionStatus::Accepted: return "accepted";
        case RegionStatus::Empty: return "empty";
        case RegionStatus::Subdivided: return "subdivided";
        case RegionStatus::Unresolved: return "unresolved";
        case RegionStatus::BoundaryRoot: return "boundary-root";
    }
    return "unknown";
}

void SearchConfig::validate() const {
    if (!(kappa_c_sq >= 1.0)) throw Error(ErrorKind::InvalidInput, "kappa_c (critical squared condition number) must be >= 1");
    if (!(eps0 > 0.0 && eps0 <= 0.5)) throw Error(ErrorKind::InvalidInput, "eps0 must be in (0, 0.5]");
    if (!(eps_i > 0.0 && eps_i < 1e-2)) throw Error(ErrorKind::InvalidInput, "eps_i must be in (0, 1e-2)");
    if (n_max_region < 1) throw Error(ErrorKind::InvalidInput, "n_max_region must be >= 1");
    if (max_depth < 0) throw Error(ErrorKind::InvalidInput, "max_depth must be >= 0");
    if (!(jitter_fraction > 0.0 && jitter_fraction < 0.1))
        throw Error(ErrorKind::InvalidInput, "jitter_fraction must be in (0, 0.1)");
    if (eval_budget < 1000) throw Error(ErrorKind::InvalidInput, "eval_budget must be >= 1000");
    if (workers < 1) throw Error(ErrorKind::InvalidInput, "workers must be >= 1");
    if (rank_tol && !(*rank_tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "rank_tol must be >= 0");
}

Rectangle jitter_retry(const Rectangle& rect, int attempt, const SearchConfig& config) {
    if (attempt < 0) throw Error(ErrorKind::InvalidInput, "jitter_retry: attempt must be >= 0");
    if (attempt > kMaxJitterAttempt)
        throw Error(ErrorKind::BoundaryRoot,
                    "root on or near the boundary of rectangle z0 = (" + std::to_string(rect.z0.real()) + ", " +
                        std::to_string(rect.z0.imag()) + "), L = " + std::to_string(rect.length) +
                        ", h = " + std::to_string(rect.height) + ", alpha = " + std::to_string(rect.alpha) +
                        " persists after " + std::to_string(kMaxJitterAttempt + 1) + " jittered retries");
    return rect.expanded(config.jitter_fraction * (1.0 + attempt) * std::min(rect.length, rect.height));
}

std::vector<const RegionDiagnostics*> SearchResult::unresolved() const {
    std::vector<const RegionDiagnostics*> out;
    collect_unresolved(tree, out);
    return out;
}

SearchResult locate_detailed(const FunctionHandle& handle, const Rectangle& rect, const SearchConfig& config) {
    config.validate();
    Rectangle top = rect;
    top.eps0 = config.eps0;
    top.validate();

    Context ctx;
    ctx.config = config;
    ctx.snap_floor = 1e-9 * std::max(top.length, top.height);

    Task root;
    root.rect = top;
    root.path = "r";
    const Rectangle grown = top.expanded(config.jitter_fraction * std::min(top.length, top.height));
    const double half = 0.5 * grown.length;
    root.own = {grown.z0.real() - half, grown.z0.real() + half, grown.z0.imag() - grown.height, grown.z0.imag(),
                true, true};

    Scheduler scheduler(handle, ctx);
    scheduler.run(std::move(root));

    SearchResult result;
    result.tree = assemble(scheduler.outcomes(), "r", result.roots, result.evaluations);
    std::sort(result.roots.begin(), result.roots.end(), [](const RootReport& a, const RootReport& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        if (a.location.imag() != b.location.imag()) return a.location.imag() < b.location.imag();
        if (a.multiplicity != b.multiplicity) return a.multiplicity < b.multiplicity;
        return a.region_path < b.region_path;
    });
    return result;
}

std::vector<RootReport> locate(const FunctionHandle& handle, const Rectangle& rect, const SearchConfig& config) {
    SearchResult result = locate_detailed(handle, rect, config);
    const auto unresolved = result.unresolved();
    if (unresolved.empty()) return std::move(result.roots);

    bool boundary = false;
    std::string message = "unresolved regions:";
    for (const auto* node : unresolved) {
        boundary = boundary || node->status == RegionStatus::BoundaryRoot;
        message += " " + node->path + " (" + node->reason + ")";
    }
    throw PartialResultError(message, std::move(result), boundary ? ErrorKind::BoundaryRoot : ErrorKind::PartialResult);
}

}  // namespace meroloc
