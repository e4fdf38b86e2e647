#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tomokl/phantom.hpp"

using namespace tomokl;

namespace {

// Brute-force line integral: midpoint rule on density_at with a tiny step.
// Independent of the closed-form chord computation.
double quadrature_line_integral(const EllipsePhantom& p, Vec2 point, Vec2 dir, double t0, double t1,
                                std::size_t steps) {
    const double n = std::hypot(dir[0], dir[1]);
    const double h = (t1 - t0) / double(steps);
    double acc = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + (double(k) + 0.5) * h;
        acc += p.density_at(point[0] + t * dir[0] / n, point[1] + t * dir[1] / n);
    }
    return acc * h;
}

}  // namespace

TEST_CASE("Ellipse invariants") {
    CHECK_THROWS_AS(Ellipse({0, 0}, {0.0, 1.0}, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Ellipse({0, 0}, {1.0, -1.0}, 0.0, 1.0), std::invalid_argument);
    const Ellipse e({0, 0}, {1, 2}, -0.25 * std::numbers::pi, 1.0);
    CHECK(e.rotation == doctest::Approx(0.75 * std::numbers::pi));
    const Ellipse f({0, 0}, {1, 2}, 3.0 * std::numbers::pi + 0.1, 1.0);
    CHECK(f.rotation == doctest::Approx(0.1));
}

TEST_CASE("Shepp-Logan parameter table") {
    const EllipsePhantom sl = standard_shepp_logan();
    REQUIRE(sl.size() == 10);
    const auto& outer = sl.ellipses()[0];
    CHECK(outer.semi_axes[0] == 0.69);
    CHECK(outer.semi_axes[1] == 0.92);
    CHECK(outer.density == 1.0);

    // Published values: modified contrast 1, -.8, -.2, -.2, .1 x6 and the
    // original 1, -.98, -.02, -.02, .01 x6 share one geometry.
    const double modified[10] = {1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
    const double original[10] = {1.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01};
    const EllipsePhantom orig = original_shepp_logan();
    for (std::size_t k = 0; k < 10; ++k) {
        CHECK(sl.ellipses()[k].density == modified[k]);
        CHECK(orig.ellipses()[k].density == original[k]);
        CHECK(orig.ellipses()[k].center == sl.ellipses()[k].center);
        CHECK(orig.ellipses()[k].semi_axes == sl.ellipses()[k].semi_axes);
    }

    CHECK(sl.density_at(0.0, 0.0) == doctest::Approx(0.2));
    CHECK(sl.density_at(0.0, 0.0) > 0.0);
    CHECK(sl.density_at(0.99, 0.99) == 0.0);
    CHECK(sl.density_at(0.0, 0.35) == doctest::Approx(0.3));
    // The right ventricle (x = 0.22) is tilted so its top leans outward: a point
    // 0.3 along its major axis is inside it (density 1 - 0.8 - 0.2), the
    // mirrored point misses it and lands in the upper ellipse (1 - 0.8 + 0.1).
    const double s18 = std::sin(18.0 * std::numbers::pi / 180.0), c18 = std::cos(18.0 * std::numbers::pi / 180.0);
    CHECK(sl.density_at(0.22 + 0.3 * s18, 0.3 * c18) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(sl.density_at(0.22 - 0.3 * s18, 0.3 * c18) == doctest::Approx(0.3));
}

TEST_CASE("rasterize samples pixel centers over [-1, 1]^2") {
    CHECK_THROWS_AS(rasterize(standard_shepp_logan(), 0, 4), std::invalid_argument);
    const EllipsePhantom big({Ellipse({0, 0}, {3, 3}, 0.0, 2.5)});
    const Image2D c = rasterize(big, 7, 5);
    for (double v : c.data()) CHECK(v == 2.5);
    const Image2D z = rasterize(EllipsePhantom(), 4, 4);
    for (double v : z.data()) CHECK(v == 0.0);

    const Image2D disk = rasterize(disk_phantom(1.0), 256, 256);
    const double area = sum(disk) * disk.spacing() * disk.spacing();
    CHECK(std::abs(area - std::numbers::pi) / std::numbers::pi < 0.01);
}

TEST_CASE("rasterization mass converges with resolution") {
    const EllipsePhantom sl = standard_shepp_logan();
    double exact = 0.0;
    for (const auto& e : sl.ellipses()) exact += std::numbers::pi * e.semi_axes[0] * e.semi_axes[1] * e.density;
    double prev_err = 0.0;
    for (std::size_t n : {64, 128, 256, 512}) {
        const Image2D img = rasterize(sl, n, n);
        const double err = std::abs(sum(img) * img.spacing() * img.spacing() - exact);
        if (prev_err > 0.0) CHECK(err <= 4.0 * 0.5 * prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 2e-3);
}

TEST_CASE("analytic line integrals") {
    const EllipsePhantom disk = disk_phantom(1.0);
    CHECK(analytic_line_integral(disk, {0, 0}, {1, 0}) == doctest::Approx(2.0));
    CHECK(analytic_line_integral(disk, {0.5, 0}, {0, 1}) == doctest::Approx(1.7320508075688772));
    CHECK(analytic_line_integral(disk, {1.5, 0}, {0, 1}) == 0.0);
    CHECK(analytic_line_integral(disk, {0, 0}, {0, 3}) == doctest::Approx(2.0));  // normalized internally
    CHECK_THROWS_AS(analytic_line_integral(disk, {0, 0}, {0, 0}), std::invalid_argument);
    CHECK(analytic_half_line_integral(disk, {0, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(analytic_half_line_integral(disk, {-3, 0}, {-1, 0}) == 0.0);
    CHECK(analytic_half_line_integral(disk, {-3, 0.6}, {1, 0}) == doctest::Approx(1.6));
}

TEST_CASE("closed-form chords agree with brute-force quadrature") {
    const EllipsePhantom sl = standard_shepp_logan();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.8, 0.8), ang(0.0, std::numbers::pi);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec2 p{u(rng), u(rng)};
        const double a = ang(rng);
        const Vec2 d{std::cos(a), std::sin(a)};
        const double exact = analytic_line_integral(sl, p, d);
        const double approx = quadrature_line_integral(sl, p, d, -3.0, 3.0, 400000);
        CHECK(exact == doctest::Approx(approx).epsilon(1e-3).scale(1.0));
    }
}

TEST_CASE("line integral additivity and rotation equivariance") {
    const EllipsePhantom a({Ellipse({0.1, -0.2}, {0.3, 0.5}, 0.4, 1.3)});
    const EllipsePhantom b({Ellipse({-0.3, 0.25}, {0.2, 0.1}, 2.0, -0.7), Ellipse({0, 0}, {0.6, 0.6}, 0.0, 0.2)});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec2 p{u(rng), u(rng)};
        const double t = ang(rng);
        const Vec2 d{std::cos(t), std::sin(t)};
        CHECK(analytic_line_integral(a + b, p, d) ==
              doctest::Approx(analytic_line_integral(a, p, d) + analytic_line_integral(b, p, d)).epsilon(1e-12));

        const double phi = ang(rng);
        const double c = std::cos(phi), s = std::sin(phi);
        auto rot = [&](Vec2 v) { return Vec2{c * v[0] - s * v[1], s * v[0] + c * v[1]}; };
        EllipsePhantom rotated;
        const EllipsePhantom both = a + b;
        for (const auto& e : both.ellipses())
            rotated.add(Ellipse(rot(e.center), e.semi_axes, e.rotation + phi, e.density));
        CHECK(std::abs(analytic_line_integral(rotated, rot(p), rot(d)) - analytic_line_integral(a + b, p, d)) < 1e-12);
    }
}
