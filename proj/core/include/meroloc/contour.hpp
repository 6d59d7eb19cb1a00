#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "meroloc/functions.hpp"
#include "meroloc/geometry.hpp"

namespace meroloc {

/// Samples of f around the rectangle boundary, counterclockwise from corner D,
/// with the continuously extended argument theta. The last sample repeats the
/// first point (the contour is closed).
struct BoundaryTrace {
    std::vector<Complex> points;
    std::vector<Complex> f_values;
    std::vector<double> theta;
    std::vector<double> log_abs;
};

/// zeta-space moments G_0 .. G_{n-1} with G_0 = W exactly.
struct MomentVector {
    std::vector<Complex> values;
    int winding = 0;
    /// Largest estimated absolute quadrature error over all moments.
    double eps_i = 0.0;
    double requested_eps = 0.0;
    /// Image of the starting corner D.
    Complex zeta_start;
    std::uint64_t evaluations = 0;
};

struct ContourOptions {
    /// Maximum number of bisections of an initial sampling interval while
    /// resolving argument jumps.
    int max_depth = 40;
    std::uint64_t eval_budget = 200000;
    /// Panels on the longest edge at start; shorter edges get proportionally
    /// fewer (at least 4).
    int initial_panels = 16;
    /// Rectangle whose annulus map T defines the moments. Defaults to the
    /// integration rectangle; set it to compare moments of sub-rectangles
    /// against a common map.
    std::optional<Rectangle> map_rect;
};

/// Incremental boundary sampler shared by the trace and every moment order.
/// Evaluations of f are cached, so asking for more moments later only pays
/// for the additional refinement.
class ContourIntegrator {
public:
    ContourIntegrator(FunctionHandle handle, const Rectangle& rect, ContourOptions options = {});

    /// Builds (once) and returns the unwrapped boundary trace.
    const BoundaryTrace& trace();
    int winding();

    /// Moments G_0..G_{count-1}, each with estimated absolute error <= eps.
    MomentVector moments(std::size_t count, double eps);

    [[nodiscard]] std::uint64_t evaluations() const noexcept { return evaluations_; }
    [[nodiscard]] const Rectangle& rectangle() const noexcept { return rect_; }

private:
    struct Sample {
        Complex z;
        Complex f;
        Complex zeta;
        double log_abs = 0.0;
        double arg = 0.0;
        double theta = 0.0;
    };
    struct Panel {
        int edge;
        double a;
        double b;
    };
    using EdgeSamples = std::map<double, Sample>;

    Sample evaluate(int edge, double t);
    void insert(int edge, double t);
    void add_panel_nodes(const Panel& panel);
    void unwrap();
    void ensure_continuity();
    void initialise();

    FunctionHandle handle_;
    Rectangle rect_;
    Rectangle map_;
    ContourOptions options_;
    std::array<Complex, 4> corners_;
    std::array<EdgeSamples, 4> edges_;
    std::vector<Panel> panels_;
    double min_width_ = 0.0;
    std::uint64_t evaluations_ = 0;
    bool initialised_ = false;
    bool trace_valid_ = false;
    BoundaryTrace trace_;
    int winding_ = 0;
};

/// Samples f on the boundary until adjacent argument jumps are below pi/2.
/// Throws BoundaryProximity when that fails within max_depth bisections or
/// |f| under/overflows at a sample.
BoundaryTrace trace_argument(const FunctionHandle& handle, const Rectangle& rect, int max_depth = 40);

/// round(delta theta / 2 pi); InconsistentTrace when more than 0.25 off.
int winding_number(const BoundaryTrace& trace);

/// Moments G_0..G_{2K-1} on rect.
MomentVector moments(const FunctionHandle& handle, const Rectangle& rect, std::size_t k, double eps_i,
                     const ContourOptions& options = {});

}  // namespace meroloc
