#pragma once

#include <array>
#include <complex>

#include "meroloc/errors.hpp"

namespace meroloc {

using Complex = std::complex<double>;

/// A search rectangle together with its map onto a slotted annulus.
///
/// Work in rotated coordinates w = z e^{-i alpha}. The edge CD is the segment
/// Im w = Im z0, |Re w - Re z0| <= L/2, and the rectangle extends a distance h
/// below it. The map
///
///     zeta = exp(-i (2 pi - eps0) (w - z0) / L)
///
/// sends CD onto the unit circle (minus a slot of angular width eps0 around
/// zeta = -1) and AB onto the circle of radius exp(-(2 pi - eps0) h / L).
///
/// Vertices, counterclockwise: D = z0 - L/2, A = D - ih, B = z0 + L/2 - ih,
/// C = z0 + L/2 (all rotated back by e^{i alpha}).
struct Rectangle {
    Complex z0;
    double alpha = 0.0;
    double length = 1.0;  // L, the length of CD
    double height = 1.0;  // h
    double eps0 = 0.1;

    /// Rectangle with opposite corners c1, c2 after rotating both by
    /// e^{-i alpha}.
    static Rectangle from_corners(Complex c1, Complex c2, double alpha = 0.0, double eps0 = 0.1);

    /// Throws InvalidInput unless L > 0, h > 0, 0 < eps0 <= 0.5 and alpha in
    /// (-pi, pi].
    void validate() const;

    [[nodiscard]] Complex to_rotated(Complex z) const;
    [[nodiscard]] Complex from_rotated(Complex w) const;

    enum Vertex { D = 0, A = 1, B = 2, C = 3 };
    /// Vertices in contour order D, A, B, C.
    [[nodiscard]] std::array<Complex, 4> vertices() const;

    /// 2 pi - eps0.
    [[nodiscard]] double angular_span() const noexcept;
    [[nodiscard]] double inner_radius() const;
    [[nodiscard]] double area() const noexcept { return length * height; }

    /// Grown outward by `amount` on every side.
    [[nodiscard]] Rectangle expanded(double amount) const;
};

struct AnnulusInfo {
    double r_in = 0.0;
    double slot_half_angle = 0.0;
    Rectangle::Vertex start_corner = Rectangle::D;
};

[[nodiscard]] AnnulusInfo annulus_info(const Rectangle& rect);

[[nodiscard]] Complex to_annulus(const Rectangle& rect, Complex z);

/// Inverse of to_annulus with the principal logarithm. Throws BranchCut when
/// zeta is zero or lies inside the slot.
[[nodiscard]] Complex from_annulus(const Rectangle& rect, Complex zeta);

/// |dz/dzeta| of the inverse map at zeta.
[[nodiscard]] double inverse_map_scale(const Rectangle& rect, Complex zeta);

/// The two halves of rect, lower coordinate first.
[[nodiscard]] std::array<Rectangle, 2> bisect_length(const Rectangle& rect);
[[nodiscard]] std::array<Rectangle, 2> bisect_height(const Rectangle& rect);

/// Bisects the longer side (L on ties).
[[nodiscard]] std::array<Rectangle, 2> subdivide(const Rectangle& rect);

/// True iff z lies in the closed rectangle grown by margin on all sides.
[[nodiscard]] bool contains(const Rectangle& rect, Complex z, double margin);

}  // namespace meroloc
