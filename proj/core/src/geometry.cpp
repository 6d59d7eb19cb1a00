#include "meroloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace meroloc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Slack on the slot boundary so that the corner images themselves invert.
constexpr double kSlotSlack = 1e-12;

}  // namespace

Rectangle Rectangle::from_corners(Complex c1, Complex c2, double alpha, double eps0) {
    Rectangle probe;
    probe.alpha = alpha;
    const Complex w1 = probe.to_rotated(c1);
    const Complex w2 = probe.to_rotated(c2);
    const double x_lo = std::min(w1.real(), w2.real());
    const double x_hi = std::max(w1.real(), w2.real());
    const double y_lo = std::min(w1.imag(), w2.imag());
    const double y_hi = std::max(w1.imag(), w2.imag());

    Rectangle rect;
    rect.alpha = alpha;
    rect.eps0 = eps0;
    rect.z0 = {0.5 * (x_lo + x_hi), y_hi};
    rect.length = x_hi - x_lo;
    rect.height = y_hi - y_lo;
    rect.validate();
    return rect;
}

void Rectangle::validate() const {
    if (!(std::isfinite(z0.real()) && std::isfinite(z0.imag())))
        throw Error(ErrorKind::InvalidInput, "rectangle: z0 must be finite");
    if (!(length > 0.0) || !std::isfinite(length))
        throw Error(ErrorKind::InvalidInput, "rectangle: length must be > 0 (corners coincide?)");
    if (!(height > 0.0) || !std::isfinite(height))
        throw Error(ErrorKind::InvalidInput, "rectangle: height must be > 0 (corners coincide?)");
    if (!(eps0 > 0.0 && eps0 <= 0.5)) throw Error(ErrorKind::InvalidInput, "rectangle: eps0 must be in (0, 0.5]");
    if (!(alpha > -std::numbers::pi && alpha <= std::numbers::pi))
        throw Error(ErrorKind::InvalidInput, "rectangle: alpha must be in (-pi, pi]");
}

Complex Rectangle::to_rotated(Complex z) const {
    return alpha == 0.0 ? z : z * std::polar(1.0, -alpha);
}

Complex Rectangle::from_rotated(Complex w) const {
    return alpha == 0.0 ? w : w * std::polar(1.0, alpha);
}

std::array<Complex, 4> Rectangle::vertices() const {
    const double half = 0.5 * length;
    const Complex d = z0 - half;
    const Complex c = z0 + half;
    return {from_rotated(d), from_rotated(d - kI * height), from_rotated(c - kI * height), from_rotated(c)};
}

double Rectangle::angular_span() const noexcept { return kTwoPi - eps0; }

double Rectangle::inner_radius() const { return std::exp(-angular_span() * height / length); }

Rectangle Rectangle::expanded(double amount) const {
    Rectangle out = *this;
    out.z0 += kI * amount;
    out.length += 2.0 * amount;
    out.height += 2.0 * amount;
    return out;
}

AnnulusInfo annulus_info(const Rectangle& rect) {
    return {rect.inner_radius(), 0.5 * rect.eps0, Rectangle::D};
}

Complex to_annulus(const Rectangle& rect, Complex z) {
    const Complex w = rect.to_rotated(z);
    return std::exp(-kI * rect.angular_span() * (w - rect.z0) / rect.length);
}

Complex from_annulus(const Rectangle& rect, Complex zeta) {
    if (zeta == Complex{}) throw Error(ErrorKind::BranchCut, "from_annulus: zeta = 0 has no preimage");
    const double limit = std::numbers::pi - 0.5 * rect.eps0;
    if (std::abs(std::arg(zeta)) > limit + kSlotSlack)
        throw Error(ErrorKind::BranchCut, "from_annulus: zeta lies in the slot of the annulus");
    const Complex w = rect.z0 + kI * rect.length * std::log(zeta) / rect.angular_span();
    return rect.from_rotated(w);
}

double inverse_map_scale(const Rectangle& rect, Complex zeta) {
    return rect.length / (rect.angular_span() * std::abs(zeta));
}

std::array<Rectangle, 2> bisect_length(const Rectangle& rect) {
    Rectangle lo = rect;
    Rectangle hi = rect;
    const double quarter = 0.25 * rect.length;
    lo.length = hi.length = 0.5 * rect.length;
    lo.z0 = rect.z0 - quarter;
    hi.z0 = rect.z0 + quarter;
    return {lo, hi};
}

std::array<Rectangle, 2> bisect_height(const Rectangle& rect) {
    Rectangle lo = rect;
    Rectangle hi = rect;
    lo.height = hi.height = 0.5 * rect.height;
    lo.z0 = rect.z0 - kI * (0.5 * rect.height);
    return {lo, hi};
}

std::array<Rectangle, 2> subdivide(const Rectangle& rect) {
    return rect.height > rect.length ? bisect_height(rect) : bisect_length(rect);
}

bool contains(const Rectangle& rect, Complex z, double margin) {
    const Complex w = rect.to_rotated(z);
    const double slack = 1e-14 * (std::abs(rect.z0) + rect.length + rect.height);
    const double m = margin + slack;
    const double dx = std::abs(w.real() - rect.z0.real());
    const double y = w.imag();
    return dx <= 0.5 * rect.length + m && y <= rect.z0.imag() + m && y >= rect.z0.imag() - rect.height - m;
}

}  // namespace meroloc
