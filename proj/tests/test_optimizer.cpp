#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "tomokl/optimizer.hpp"

using namespace tomokl;

namespace {

Image2D positive_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    return testing::random_image(rows, cols, seed, 0.5, 4.0);
}

// argmin by golden-section search, independent of the closed form.
double prox_by_search(double z, double f, double beta) {
    auto phi = [&](double u) { return beta * (u - (f > 0.0 ? f * std::log(u) : 0.0)) + 0.5 * (u - z) * (u - z); };
    double a = 1e-12, b = std::abs(z) + beta * f + 10.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 0; k < 300; ++k) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (phi(c) < phi(d)) b = d;
        else a = c;
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("periodic forward differences") {
    const Image2D u(1, 4, {0.0, 1.0, 2.0, 3.0});
    const VectorField g = grad(u);
    CHECK(g.dx.data()[0] == 1.0);
    CHECK(g.dx.data()[1] == 1.0);
    CHECK(g.dx.data()[2] == 1.0);
    CHECK(g.dx.data()[3] == -3.0);
    for (double v : g.dy.data()) CHECK(v == 0.0);
    CHECK(tv(u) == 6.0);

    // Two rows of a step edge: each row jumps up once and wraps down once.
    const Image2D step(2, 4, {0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0});
    CHECK(tv(step) == 4.0);
    const Image2D dot1(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0});
    CHECK(tv(dot1) == doctest::Approx(2.0 + std::sqrt(2.0)));
}

TEST_CASE("divergence is the negative adjoint of grad") {
    const Image2D u = testing::random_image(9, 13, 1);
    const VectorField p{testing::random_image(9, 13, 2), testing::random_image(9, 13, 3)};
    const VectorField gu = grad(u);
    const double lhs = dot(gu.dx, p.dx) + dot(gu.dy, p.dy);
    CHECK(lhs == doctest::Approx(-dot(u, divergence(p))).epsilon(1e-12));
}

TEST_CASE("total variation is absolutely homogeneous and shift invariant") {
    const Image2D u = testing::random_image(10, 10, 4);
    CHECK(tv(-2.5 * u) == doctest::Approx(2.5 * tv(u)).epsilon(1e-12));
    CHECK(tv(u + Image2D(10, 10, 1.0, 7.0)) == doctest::Approx(tv(u)).epsilon(1e-12));
    CHECK(tv(Image2D(5, 6, 1.0, 3.0)) == 0.0);
}

TEST_CASE("KL objective") {
    CHECK(kl_objective(Image2D(2, 2, 1.0, 1.0), Image2D(2, 2, 1.0, 1.0)) == 4.0);
    CHECK(kl_objective(Image2D(1, 1, 1.0, std::numbers::e), Image2D(1, 1, 1.0, 1.0)) ==
          doctest::Approx(std::numbers::e - 1.0));
    CHECK(kl_objective(Image2D(1, 1, 1.0, 0.0), Image2D(1, 1, 1.0, 0.0)) == 0.0);
    CHECK(kl_objective(Image2D(1, 1, 1.0, 0.0), Image2D(1, 1, 1.0, 1.0)) == std::numeric_limits<double>::infinity());
    CHECK(kl_objective(Image2D(1, 1, 1.0, 2.0), Image2D(1, 1, 1.0, 0.0)) == 2.0);

    // Gradient 1 - f/u against central differences.
    const Image2D u = positive_image(4, 5, 6);
    const Image2D f = positive_image(4, 5, 7);
    const double h = 1e-6;
    for (std::size_t k = 0; k < u.size(); ++k) {
        Image2D up = u, um = u;
        up.data()[k] += h;
        um.data()[k] -= h;
        const double fd = (kl_objective(up, f) - kl_objective(um, f)) / (2.0 * h);
        CHECK(fd == doctest::Approx(1.0 - f.data()[k] / u.data()[k]).epsilon(1e-6));
    }
    // Minimized at u = f.
    CHECK(kl_objective(f, f) < kl_objective(u, f));
}

TEST_CASE("shrinkage") {
    CHECK(shrink(3.0, 1.0) == 2.0);
    CHECK(shrink(-3.0, 1.0) == -2.0);
    CHECK(shrink(0.5, 1.0) == 0.0);
    CHECK(shrink(-1.0, 1.0) == 0.0);
    const auto v = shrink(std::array<double, 2>{3.0, 4.0}, 1.0);
    CHECK(v[0] == doctest::Approx(2.4));
    CHECK(v[1] == doctest::Approx(3.2));
    const auto z = shrink(std::array<double, 2>{0.3, 0.4}, 0.5);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const std::array<double, 2> a{u(rng), u(rng)}, b{u(rng), u(rng)};
        const double t = std::abs(u(rng));
        const auto sa = shrink(a, t), sb = shrink(b, t);
        CHECK(std::hypot(sa[0] - sb[0], sa[1] - sb[1]) <= std::hypot(a[0] - b[0], a[1] - b[1]) + 1e-15);
        const double x = u(rng), y = u(rng);
        CHECK(std::abs(shrink(x, t) - shrink(y, t)) <= std::abs(x - y) + 1e-15);
    }
}

TEST_CASE("KL proximal map") {
    CHECK(kl_prox(3.0, 2.0, 1.0) == doctest::Approx(1.0 + std::sqrt(3.0)));
    CHECK(kl_prox(3.0, 0.0, 1.0) == doctest::Approx(2.0));
    CHECK(kl_prox(0.5, 0.0, 1.0) == 0.0);
    CHECK(kl_prox(2.0, 2.0, 0.7) == doctest::Approx(2.0));  // z = f is a fixed point
    CHECK_THROWS_AS(kl_prox(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kl_prox(1.0, -1.0, 1.0), std::invalid_argument);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> zd(-20.0, 20.0), fdist(0.0, 10.0), bd(0.01, 5.0);
    for (int k = 0; k < 200; ++k) {
        const double z = zd(rng), f = fdist(rng), beta = bd(rng);
        const double u = kl_prox(z, f, beta);
        CHECK(u >= 0.0);
        CHECK(u == doctest::Approx(prox_by_search(z, f, beta)).epsilon(1e-6).scale(1.0));
        // Stationarity: beta (1 - f/u) + u - z = 0.
        if (u > 1e-8) CHECK(std::abs(beta * (1.0 - f / u) + u - z) < 1e-9 * (1.0 + std::abs(z) + beta * f / u));
    }
    // Tiny beta f with very negative z stays strictly positive.
    CHECK(kl_prox(-1e8, 1e-3, 1e-3) > 0.0);
}

TEST_CASE("solver configuration validation") {
    const Image2D f = positive_image(8, 8, 1);
    SolverConfig cfg;
    CHECK_THROWS_AS(denoise(f, Model::TV, cfg), std::invalid_argument);  // alpha = 0
    cfg.alpha = 0.1;
    cfg.penalty = 0.0;
    CHECK_THROWS_AS(denoise(f, Model::TV, cfg), std::invalid_argument);
    cfg.penalty = 1.0;
    Image2D bad = f;
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(denoise(bad, Model::TV, cfg), std::invalid_argument);
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(denoise(f, Model::Linear, cfg), std::invalid_argument);
    cfg.lambda = 0.1;
    cfg.band_weights = {1.0, 2.0};
    CHECK_THROWS_AS(denoise(f, Model::Linear, cfg), std::invalid_argument);
    CHECK(parse_model("cubic") == Model::Cubic);
    CHECK(to_string(Model::TV) == "tv");
    CHECK_THROWS_AS(parse_model("l0"), std::invalid_argument);
}

TEST_CASE("constant data is a fixed point") {
    const Image2D f(12, 12, 1.0, 2.5);
    SolverConfig cfg;
    cfg.alpha = 0.3;
    cfg.lambda = 0.3;
    cfg.rel_tol = 1e-10;
    cfg.max_iters = 20000;
    for (Model m : {Model::TV, Model::Haar, Model::Linear, Model::Cubic}) {
        const DenoiseResult r = denoise(f, m, cfg);
        CHECK(r.report.converged);
        CHECK(testing::max_abs_diff(r.image, f) < 1e-6);
    }
}

TEST_CASE("vanishing weights return the data") {
    const Image2D f = positive_image(16, 16, 5);
    SolverConfig cfg;
    cfg.alpha = 1e-7;
    cfg.lambda = 0.0;
    cfg.rel_tol = 1e-10;
    cfg.max_iters = 20000;
    const DenoiseResult tvr = denoise(f, Model::TV, cfg);
    CHECK(testing::max_abs_diff(tvr.image, f) < 1e-4);
    for (Model m : {Model::Linear, Model::Cubic}) {
        const DenoiseResult r = denoise(f, m, cfg);
        CHECK(r.report.converged);
        CHECK(testing::max_abs_diff(r.image, f) < 1e-6);
    }
}

TEST_CASE("solver reports, output sign and determinism") {
    Image2D f = positive_image(24, 20, 9);
    f(3, 4) = 0.0;
    SolverConfig cfg;
    cfg.alpha = 0.2;
    cfg.lambda = 0.2;
    for (Model m : {Model::TV, Model::Linear, Model::Cubic}) {
        const DenoiseResult a = denoise(f, m, cfg);
        const DenoiseResult b = denoise(f, m, cfg);
        CHECK(a.report.objective_trace.size() == a.report.iterations);
        CHECK(a.report.converged);
        CHECK(a.report.final_rel_change <= cfg.rel_tol);
        CHECK(a.report.final_objective <= a.report.initial_objective);
        CHECK(testing::max_abs_diff(a.image, b.image) == 0.0);
        CHECK(min_value(a.image) >= 0.0);
        for (std::size_t k = 0; k < f.size(); ++k)
            if (f.data()[k] > 0.0) CHECK(a.image.data()[k] >= cfg.floor);
    }
    cfg.max_iters = 3;
    cfg.rel_tol = 1e-14;
    const DenoiseResult capped = denoise(f, Model::TV, cfg);
    CHECK(capped.report.iterations == 3);
    CHECK_FALSE(capped.report.converged);
}

TEST_CASE("solver output minimizes the objective against perturbations") {
    const Image2D f = positive_image(16, 16, 21);
    SolverConfig cfg;
    cfg.alpha = 0.4;
    cfg.lambda = 0.3;
    cfg.rel_tol = 1e-9;
    cfg.max_iters = 20000;
    std::uint64_t seed = 50;
    for (Model m : {Model::TV, Model::Linear}) {
        const DenoiseResult r = denoise(f, m, cfg);
        const double e0 = objective(r.image, f, m, cfg);
        for (int k = 0; k < 10; ++k) {
            const Image2D p = r.image + 1e-3 * testing::random_image(16, 16, seed++);
            CHECK(objective(p, f, m, cfg) >= e0 - 1e-7);
        }
    }
}

TEST_CASE("Haar framelet with lambda = 2 alpha reproduces TV on one-dimensional data") {
    const Image2D row = positive_image(1, 32, 33);
    Image2D f(4, 32);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 32; ++j) f(i, j) = row(0, j);
    SolverConfig cfg;
    cfg.alpha = 0.35;
    cfg.lambda = 0.7;
    cfg.rel_tol = 1e-11;
    cfg.max_iters = 50000;
    const DenoiseResult a = denoise(f, Model::TV, cfg);
    const DenoiseResult b = denoise(f, Model::Haar, cfg);
    CHECK(testing::max_abs_diff(a.image, b.image) < 1e-4);
    CHECK(objective(b.image, f, Model::Haar, cfg) == doctest::Approx(objective(a.image, f, Model::TV, cfg)).epsilon(1e-6));
}
