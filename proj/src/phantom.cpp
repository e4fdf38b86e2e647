#include "tomokl/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tomokl {

namespace {

double normalize_rotation(double theta) {
    double r = std::fmod(theta, std::numbers::pi);
    if (r < 0.0) r += std::numbers::pi;
    if (r >= std::numbers::pi) r = 0.0;
    return r;
}

Vec2 unit_direction(Vec2 d) {
    const double n = std::hypot(d[0], d[1]);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("line integral: direction must be a nonzero vector");
    return {d[0] / n, d[1] / n};
}

// Roots t1 <= t2 of |p' + t d'|^2 = 1 in the ellipse's unit-disk frame.
// Returns false when the line misses or grazes the ellipse.
bool intersect(const Ellipse& e, Vec2 p, Vec2 d, double& t1, double& t2) {
    const double c = std::cos(e.rotation);
    const double s = std::sin(e.rotation);
    const double px = p[0] - e.center[0];
    const double py = p[1] - e.center[1];
    const double lx = (c * px + s * py) / e.semi_axes[0];
    const double ly = (-s * px + c * py) / e.semi_axes[1];
    const double dx = (c * d[0] + s * d[1]) / e.semi_axes[0];
    const double dy = (-s * d[0] + c * d[1]) / e.semi_axes[1];
    const double qa = dx * dx + dy * dy;
    const double qb = lx * dx + ly * dy;
    const double qc = lx * lx + ly * ly - 1.0;
    const double disc = qb * qb - qa * qc;
    if (disc <= 0.0) return false;
    const double root = std::sqrt(disc);
    t1 = (-qb - root) / qa;
    t2 = (-qb + root) / qa;
    return true;
}

}  // namespace

Ellipse::Ellipse(Vec2 c, Vec2 axes, double rot, double rho)
    : center(c), semi_axes(axes), rotation(normalize_rotation(rot)), density(rho) {
    if (!(axes[0] > 0.0) || !(axes[1] > 0.0)) throw std::invalid_argument("Ellipse: semi-axes must be positive");
}

bool Ellipse::contains(double x, double y) const noexcept {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    const double dx = x - center[0];
    const double dy = y - center[1];
    const double u = (c * dx + s * dy) / semi_axes[0];
    const double v = (-s * dx + c * dy) / semi_axes[1];
    return u * u + v * v <= 1.0;
}

double Ellipse::chord(Vec2 point, Vec2 dir) const noexcept {
    double t1 = 0.0, t2 = 0.0;
    if (!intersect(*this, point, dir, t1, t2)) return 0.0;
    return t2 - t1;
}

double Ellipse::half_line_chord(Vec2 point, Vec2 dir) const noexcept {
    double t1 = 0.0, t2 = 0.0;
    if (!intersect(*this, point, dir, t1, t2) || t2 <= 0.0) return 0.0;
    return t2 - std::max(t1, 0.0);
}

double EllipsePhantom::density_at(double x, double y) const noexcept {
    double total = 0.0;
    for (const auto& e : ellipses_)
        if (e.contains(x, y)) total += e.density;
    return total;
}

EllipsePhantom EllipsePhantom::operator+(const EllipsePhantom& other) const {
    std::vector<Ellipse> all = ellipses_;
    all.insert(all.end(), other.ellipses_.begin(), other.ellipses_.end());
    return EllipsePhantom(std::move(all));
}

namespace {

struct SheppRow {
    double a, b, x0, y0, phi_deg;
};

// Shared geometry of the Shepp-Logan head (semi-axes, centers, tilt in degrees).
constexpr SheppRow kSheppGeometry[10] = {
    {0.69, 0.92, 0.0, 0.0, 0.0},        {0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {0.1100, 0.3100, 0.22, 0.0, -18.0}, {0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.2100, 0.2500, 0.0, 0.35, 0.0},   {0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.0460, 0.0460, 0.0, -0.1, 0.0},   {0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.0230, 0.0230, 0.0, -0.606, 0.0}, {0.0230, 0.0460, 0.06, -0.605, 0.0},
};

EllipsePhantom build_shepp(const double (&densities)[10]) {
    std::vector<Ellipse> out;
    out.reserve(10);
    for (int k = 0; k < 10; ++k) {
        const auto& r = kSheppGeometry[k];
        out.emplace_back(Vec2{r.x0, r.y0}, Vec2{r.a, r.b}, r.phi_deg * std::numbers::pi / 180.0, densities[k]);
    }
    return EllipsePhantom(std::move(out));
}

}  // namespace

EllipsePhantom standard_shepp_logan() {
    static constexpr double kModified[10] = {1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
    return build_shepp(kModified);
}

EllipsePhantom original_shepp_logan() {
    static constexpr double kOriginal[10] = {1.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01};
    return build_shepp(kOriginal);
}

EllipsePhantom disk_phantom(double radius, double density) {
    return EllipsePhantom({Ellipse({0.0, 0.0}, {radius, radius}, 0.0, density)});
}

Image2D rasterize(const EllipsePhantom& phantom, std::size_t rows, std::size_t cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("rasterize: M and N must be at least 1");
    Image2D img(rows, cols, 2.0 / double(std::max(rows, cols)));
    for (std::size_t i = 0; i < rows; ++i) {
        const double y = img.y_of(double(i));
        for (std::size_t j = 0; j < cols; ++j) img(i, j) = phantom.density_at(img.x_of(double(j)), y);
    }
    return img;
}

double analytic_line_integral(const EllipsePhantom& phantom, Vec2 point, Vec2 direction) {
    const Vec2 d = unit_direction(direction);
    double total = 0.0;
    for (const auto& e : phantom.ellipses()) total += e.density * e.chord(point, d);
    return total;
}

double analytic_half_line_integral(const EllipsePhantom& phantom, Vec2 origin, Vec2 direction) {
    const Vec2 d = unit_direction(direction);
    double total = 0.0;
    for (const auto& e : phantom.ellipses()) total += e.density * e.half_line_chord(origin, d);
    return total;
}

}  // namespace tomokl
