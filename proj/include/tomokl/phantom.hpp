#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tomokl/image.hpp"

namespace tomokl {

using Vec2 = std::array<double, 2>;

/// One additive ellipse of a piecewise-constant density.
struct Ellipse {
    Vec2 center{0.0, 0.0};
    Vec2 semi_axes{1.0, 1.0};  // (a, b); a lies along x before rotation
    double rotation = 0.0;     // radians, normalized to [0, pi)
    double density = 1.0;

    Ellipse() = default;
    Ellipse(Vec2 center, Vec2 semi_axes, double rotation, double density);

    bool contains(double x, double y) const noexcept;

    /// Chord length of the full line {point + t*dir}. `dir` must be unit length.
    double chord(Vec2 point, Vec2 dir) const noexcept;
    /// Length of the half-line {point + t*dir, t >= 0} inside the ellipse.
    double half_line_chord(Vec2 point, Vec2 dir) const noexcept;
};

class EllipsePhantom {
public:
    EllipsePhantom() = default;
    explicit EllipsePhantom(std::vector<Ellipse> ellipses) : ellipses_(std::move(ellipses)) {}

    const std::vector<Ellipse>& ellipses() const noexcept { return ellipses_; }
    std::size_t size() const noexcept { return ellipses_.size(); }
    void add(const Ellipse& e) { ellipses_.push_back(e); }

    /// Sum of the densities of every ellipse containing (x, y).
    double density_at(double x, double y) const noexcept;

    /// Concatenation; densities add where ellipses overlap.
    EllipsePhantom operator+(const EllipsePhantom& other) const;

private:
    std::vector<Ellipse> ellipses_;
};

/// The 10-ellipse Shepp-Logan head in its modified (Toft) contrast, as
/// shipped by MATLAB's `phantom` default.
EllipsePhantom standard_shepp_logan();

/// Same geometry with the low-contrast Shepp-Logan densities (1, -0.98, -0.02, ...).
EllipsePhantom original_shepp_logan();

/// Density 1 disk of radius r centered at the origin.
EllipsePhantom disk_phantom(double radius = 1.0, double density = 1.0);

/// Samples the phantom at pixel centers on a centered grid with spacing
/// 2 / max(M, N); a square grid spans exactly [-1, 1]^2.
Image2D rasterize(const EllipsePhantom& phantom, std::size_t rows, std::size_t cols);

/// Exact integral of the density along the full line through `point` with
/// direction `direction` (normalized internally; zero vectors are rejected).
double analytic_line_integral(const EllipsePhantom& phantom, Vec2 point, Vec2 direction);

/// Exact integral along the half-line starting at `origin`.
double analytic_half_line_integral(const EllipsePhantom& phantom, Vec2 origin, Vec2 direction);

}  // namespace tomokl
