#include "tomokl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <tuple>

#include "tomokl/counter_rng.hpp"

namespace tomokl {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// (u, v) coordinates of a tangent vector in the basis pu, pv.
std::array<double, 2> tangent_coords(const CurvatureData& cd, const Vec3& w) {
    const double x = dot(w, cd.pu);
    const double y = dot(w, cd.pv);
    const double det = cd.E * cd.G - cd.F * cd.F;
    return {(cd.G * x - cd.F * y) / det, (cd.E * y - cd.F * x) / det};
}

double second_form(const CurvatureData& cd, const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return cd.L * a[0] * b[0] + cd.M * (a[0] * b[1] + a[1] * b[0]) + cd.N * a[1] * b[1];
}

CurvatureClass classify(double k1, double k2, double tau) {
    const double big = std::max(std::abs(k1), std::abs(k2));
    const double small = std::min(std::abs(k1), std::abs(k2));
    if (big <= tau) return CurvatureClass::Flat;
    if (small <= tau) return CurvatureClass::Parabolic;
    return k1 * k2 > 0.0 ? CurvatureClass::Positive : CurvatureClass::Negative;
}

// Largest distance from the patch along p + t w for t in (0, eps0]; gives up
// (returning the first exceeding distance) once `cutoff` is exceeded.
double ray_max_distance(const SurfacePatch& patch, const Vec3& p, const Vec3& w, double u, double v,
                        const SingularityOptions& opts, double cutoff) {
    double worst = 0.0;
    for (std::size_t k = 1; k <= opts.ray_samples; ++k) {
        const double t = opts.eps0 * double(k) / double(opts.ray_samples);
        const double d = distance_to_patch(patch, p + t * w, u, v);
        worst = std::max(worst, d);
        if (worst > cutoff) break;
    }
    return worst;
}

struct FlatPoint {
    double u, v;
    Vec3 p, n;
};

void validate_options(const SingularityOptions& o) {
    if (!(o.eps0 > 0.0) || o.ray_samples == 0 || o.grid_u == 0 || o.grid_v == 0 || !(o.tau >= 0.0))
        throw std::invalid_argument("SingularityOptions: eps0, sample counts and tau must be positive");
}

}  // namespace

SurfacePatch::SurfacePatch(std::string name, Evaluator eval, ParamDomain domain)
    : name_(std::move(name)), eval_(std::move(eval)), domain_(domain) {
    if (!eval_) throw std::invalid_argument("SurfacePatch: empty evaluator");
    if (!(domain_.u1 > domain_.u0) || !(domain_.v1 > domain_.v0))
        throw std::invalid_argument("SurfacePatch: empty parameter domain");
}

SurfacePatch SurfacePatch::from_map(std::string name, std::function<Vec3(double, double)> map, ParamDomain domain,
                                    double h) {
    if (!map) throw std::invalid_argument("SurfacePatch::from_map: empty map");
    if (!(h > 0.0)) throw std::invalid_argument("SurfacePatch::from_map: step must be positive");
    auto eval = [map = std::move(map), h](double u, double v) {
        const Vec3 c = map(u, v);
        const Vec3 ue = map(u + h, v), uw = map(u - h, v);
        const Vec3 vn = map(u, v + h), vs = map(u, v - h);
        const Vec3 ne = map(u + h, v + h), nw = map(u - h, v + h);
        const Vec3 se = map(u + h, v - h), sw = map(u - h, v - h);
        PatchPoint pt;
        pt.p = c;
        pt.pu = (0.5 / h) * (ue - uw);
        pt.pv = (0.5 / h) * (vn - vs);
        pt.puu = (1.0 / (h * h)) * (ue - 2.0 * c + uw);
        pt.pvv = (1.0 / (h * h)) * (vn - 2.0 * c + vs);
        pt.puv = (0.25 / (h * h)) * (ne - nw - se + sw);
        return pt;
    };
    return SurfacePatch(std::move(name), std::move(eval), domain);
}

bool SurfacePatch::contains(double u, double v) const noexcept {
    if (!std::isfinite(u) || !std::isfinite(v)) return false;
    const bool in_u = domain_.periodic_u || (u >= domain_.u0 && u <= domain_.u1);
    const bool in_v = domain_.periodic_v || (v >= domain_.v0 && v <= domain_.v1);
    return in_u && in_v;
}

PatchPoint SurfacePatch::evaluate(double u, double v) const {
    if (!contains(u, v)) throw std::out_of_range("SurfacePatch '" + name_ + "': parameter outside the domain");
    return eval_(u, v);
}

void SurfacePatch::normalize(double& u, double& v) const noexcept {
    auto fix = [](double& x, double lo, double hi, bool periodic) {
        if (periodic) {
            const double span = hi - lo;
            x = lo + std::fmod(x - lo, span);
            if (x < lo) x += span;
        } else {
            x = std::clamp(x, lo, hi);
        }
    };
    fix(u, domain_.u0, domain_.u1, domain_.periodic_u);
    fix(v, domain_.v0, domain_.v1, domain_.periodic_v);
}

SurfacePatch sphere_patch(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("sphere_patch: radius must be positive");
    // Polar angle u stays away from the poles, where the chart degenerates.
    const double cap = 0.05;
    auto eval = [radius](double u, double v) {
        const double su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
        PatchPoint pt;
        pt.p = {radius * su * cv, radius * su * sv, radius * cu};
        pt.pu = {radius * cu * cv, radius * cu * sv, -radius * su};
        pt.pv = {-radius * su * sv, radius * su * cv, 0.0};
        pt.puu = -1.0 * pt.p;
        pt.puv = {-radius * cu * sv, radius * cu * cv, 0.0};
        pt.pvv = {-radius * su * cv, -radius * su * sv, 0.0};
        return pt;
    };
    return SurfacePatch("sphere", eval, {cap, kPi - cap, 0.0, 2.0 * kPi, false, true});
}

SurfacePatch cylinder_patch(double radius, double half_height) {
    if (!(radius > 0.0) || !(half_height > 0.0))
        throw std::invalid_argument("cylinder_patch: radius and height must be positive");
    auto eval = [radius](double u, double v) {
        const double su = std::sin(u), cu = std::cos(u);
        PatchPoint pt{};
        pt.p = {radius * cu, radius * su, v};
        pt.pu = {-radius * su, radius * cu, 0.0};
        pt.pv = {0.0, 0.0, 1.0};
        pt.puu = {-radius * cu, -radius * su, 0.0};
        return pt;
    };
    return SurfacePatch("cylinder", eval, {0.0, 2.0 * kPi, -half_height, half_height, true, false});
}

SurfacePatch plane_patch(double half_width) {
    if (!(half_width > 0.0)) throw std::invalid_argument("plane_patch: width must be positive");
    auto eval = [](double u, double v) {
        PatchPoint pt{};
        pt.p = {u, v, 0.0};
        pt.pu = {1.0, 0.0, 0.0};
        pt.pv = {0.0, 1.0, 0.0};
        return pt;
    };
    return SurfacePatch("plane", eval, {-half_width, half_width, -half_width, half_width});
}

SurfacePatch saddle_patch() {
    auto eval = [](double u, double v) {
        PatchPoint pt{};
        pt.p = {u, v, u * v};
        pt.pu = {1.0, 0.0, v};
        pt.pv = {0.0, 1.0, u};
        pt.puv = {0.0, 0.0, 1.0};
        return pt;
    };
    return SurfacePatch("saddle", eval, {-1.0, 1.0, -1.0, 1.0});
}

SurfacePatch hyperbolic_paraboloid_patch() {
    auto eval = [](double u, double v) {
        PatchPoint pt{};
        pt.p = {u, v, u * u - v * v};
        pt.pu = {1.0, 0.0, 2.0 * u};
        pt.pv = {0.0, 1.0, -2.0 * v};
        pt.puu = {0.0, 0.0, 2.0};
        pt.pvv = {0.0, 0.0, -2.0};
        return pt;
    };
    return SurfacePatch("paraboloid", eval, {-1.0, 1.0, -1.0, 1.0});
}

SurfacePatch torus_patch(double major, double minor) {
    if (!(minor > 0.0) || !(major > minor)) throw std::invalid_argument("torus_patch: need major > minor > 0");
    auto eval = [major, minor](double u, double v) {
        const double su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
        const double ring = major + minor * cv;
        PatchPoint pt;
        pt.p = {ring * cu, ring * su, minor * sv};
        pt.pu = {-ring * su, ring * cu, 0.0};
        pt.pv = {-minor * sv * cu, -minor * sv * su, minor * cv};
        pt.puu = {-ring * cu, -ring * su, 0.0};
        pt.puv = {minor * sv * su, -minor * sv * cu, 0.0};
        pt.pvv = {-minor * cv * cu, -minor * cv * su, -minor * sv};
        return pt;
    };
    return SurfacePatch("torus", eval, {0.0, 2.0 * kPi, 0.0, 2.0 * kPi, true, true});
}

SurfacePatch shipped_surface(const std::string& name) {
    if (name == "sphere") return sphere_patch();
    if (name == "cylinder") return cylinder_patch();
    if (name == "plane") return plane_patch();
    if (name == "saddle") return saddle_patch();
    if (name == "paraboloid") return hyperbolic_paraboloid_patch();
    if (name == "torus") return torus_patch();
    throw std::invalid_argument("unknown surface '" + name + "'");
}

std::string to_string(CurvatureClass c) {
    switch (c) {
        case CurvatureClass::Positive: return "positive";
        case CurvatureClass::Flat: return "flat";
        case CurvatureClass::Parabolic: return "parabolic";
        case CurvatureClass::Negative: return "negative";
    }
    return "?";
}

CurvatureData second_fundamental_form(const SurfacePatch& patch, double u, double v, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("second_fundamental_form: tau must be nonnegative");
    const PatchPoint pt = patch.evaluate(u, v);
    CurvatureData cd;
    cd.point = pt.p;
    cd.pu = pt.pu;
    cd.pv = pt.pv;
    cd.E = dot(pt.pu, pt.pu);
    cd.F = dot(pt.pu, pt.pv);
    cd.G = dot(pt.pv, pt.pv);
    const Vec3 nn = cross(pt.pu, pt.pv);
    const double len = norm(nn);
    if (!(len > 1e-14 * std::max(1.0, cd.E + cd.G)))
        throw std::domain_error("second_fundamental_form: patch is not immersed at this point");
    cd.normal = (1.0 / len) * nn;
    cd.L = dot(pt.puu, cd.normal);
    cd.M = dot(pt.puv, cd.normal);
    cd.N = dot(pt.pvv, cd.normal);

    // II in an orthonormal tangent frame, then a symmetric 2x2 eigen-solve.
    const Vec3 e1 = (1.0 / std::sqrt(cd.E)) * pt.pu;
    const Vec3 e2 = cross(cd.normal, e1);
    const auto c1 = tangent_coords(cd, e1);
    const auto c2 = tangent_coords(cd, e2);
    const double b11 = second_form(cd, c1, c1);
    const double b12 = second_form(cd, c1, c2);
    const double b22 = second_form(cd, c2, c2);
    const double mean = 0.5 * (b11 + b22);
    const double rad = std::hypot(0.5 * (b11 - b22), b12);
    cd.k1 = mean + rad;
    cd.k2 = mean - rad;
    const double phi = 0.5 * std::atan2(2.0 * b12, b11 - b22);
    cd.dir1 = std::cos(phi) * e1 + std::sin(phi) * e2;
    cd.dir2 = -std::sin(phi) * e1 + std::cos(phi) * e2;
    cd.K = cd.k1 * cd.k2;
    cd.H = cd.k1 + cd.k2;
    cd.cls = classify(cd.k1, cd.k2, tau);
    return cd;
}

double directional_curvature(const CurvatureData& cd, Vec3 w) {
    const Vec3 wt = w - dot(w, cd.normal) * cd.normal;
    const double len2 = dot(wt, wt);
    if (!(len2 > 0.0)) throw std::invalid_argument("directional_curvature: direction has no tangential part");
    const auto c = tangent_coords(cd, wt);
    return second_form(cd, c, c) / len2;
}

ZeroCurvatureDirections zero_curvature_directions(const CurvatureData& cd, double tau) {
    if (classify(cd.k1, cd.k2, tau) != cd.cls)
        throw std::logic_error("zero_curvature_directions: curvature class is inconsistent with the principal curvatures");
    ZeroCurvatureDirections out;
    switch (cd.cls) {
        case CurvatureClass::Positive: break;
        case CurvatureClass::Flat: out.all_directions = true; break;
        case CurvatureClass::Parabolic:
            out.directions.push_back(std::abs(cd.k2) <= tau ? cd.dir2 : cd.dir1);
            break;
        case CurvatureClass::Negative: {
            const double a = std::sqrt(std::abs(cd.k2));
            const double b = std::sqrt(std::abs(cd.k1));
            for (double sign : {1.0, -1.0}) {
                const Vec3 w = a * cd.dir1 + (sign * b) * cd.dir2;
                out.directions.push_back((1.0 / norm(w)) * w);
            }
            break;
        }
    }
    return out;
}

double distance_to_patch(const SurfacePatch& patch, const Vec3& x, double& u, double& v) {
    patch.normalize(u, v);
    PatchPoint pt = patch.evaluate(u, v);
    double dist = norm(x - pt.p);
    for (int iter = 0; iter < 30; ++iter) {
        const Vec3 r = x - pt.p;
        const double a11 = dot(pt.pu, pt.pu), a12 = dot(pt.pu, pt.pv), a22 = dot(pt.pv, pt.pv);
        const double b1 = dot(pt.pu, r), b2 = dot(pt.pv, r);
        const double det = a11 * a22 - a12 * a12;
        if (!(det > 0.0)) break;
        double du = (a22 * b1 - a12 * b2) / det;
        double dv = (a11 * b2 - a12 * b1) / det;
        bool improved = false;
        for (int halve = 0; halve < 12; ++halve) {
            double un = u + du, vn = v + dv;
            patch.normalize(un, vn);
            const PatchPoint cand = patch.evaluate(un, vn);
            const double d = norm(x - cand.p);
            if (d < dist) {
                const double moved = std::hypot(un - u, vn - v);
                u = un;
                v = vn;
                pt = cand;
                dist = d;
                improved = moved > 1e-13;
                break;
            }
            du *= 0.5;
            dv *= 0.5;
        }
        if (!improved) break;
    }
    return dist;
}

Vec3 sample_direction(std::uint64_t seed, std::uint32_t k) {
    CounterStream s(seed, k, 0x5D1Eu);
    const double z = 1.0 - 2.0 * s.uniform();
    const double phi = 2.0 * kPi * s.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

std::vector<double> singular_direction_ladder(const SurfacePatch& patch, std::size_t n_samples,
                                              const std::vector<double>& tols, std::uint64_t seed,
                                              const SingularityOptions& opts) {
    validate_options(opts);
    if (n_samples == 0) throw std::invalid_argument("singular_direction_ladder: need at least one sample");
    if (n_samples > 0xFFFFFFFFull) throw std::invalid_argument("singular_direction_ladder: too many samples");
    if (tols.empty()) return {};
    for (double t : tols)
        if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("singular_direction_ladder: tol must be positive");
    const double max_tol = *std::max_element(tols.begin(), tols.end());

    // Candidate rays from zero-curvature directions on the parameter grid.
    struct Candidate {
        Vec3 dir;
        double max_dist;
    };
    std::vector<Candidate> candidates;
    std::vector<FlatPoint> flats;
    const ParamDomain& dom = patch.domain();
    for (std::size_t i = 0; i < opts.grid_u; ++i) {
        const double u = dom.u0 + (double(i) + 0.5) * (dom.u1 - dom.u0) / double(opts.grid_u);
        for (std::size_t j = 0; j < opts.grid_v; ++j) {
            const double v = dom.v0 + (double(j) + 0.5) * (dom.v1 - dom.v0) / double(opts.grid_v);
            const CurvatureData cd = second_fundamental_form(patch, u, v, opts.tau);
            const ZeroCurvatureDirections z = zero_curvature_directions(cd, opts.tau);
            if (z.all_directions) {
                flats.push_back({u, v, cd.point, cd.normal});
                continue;
            }
            for (const Vec3& d : z.directions) {
                for (double sign : {1.0, -1.0}) {
                    const Vec3 w = sign * d;
                    const double md = ray_max_distance(patch, cd.point, w, u, v, opts, max_tol);
                    if (md <= max_tol) candidates.push_back({w, md});
                }
            }
        }
    }
    // Rays from the middle of the domain are the likeliest to stay on a flat patch.
    const double uc = 0.5 * (dom.u0 + dom.u1), vc = 0.5 * (dom.v0 + dom.v1);
    std::sort(flats.begin(), flats.end(), [&](const FlatPoint& a, const FlatPoint& b) {
        return std::hypot(a.u - uc, a.v - vc) < std::hypot(b.u - uc, b.v - vc);
    });

    // Directions sorted by z for a range search on |dz| <= tol.
    std::vector<Vec3> dirs(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) dirs[k] = sample_direction(seed, std::uint32_t(k));
    std::sort(dirs.begin(), dirs.end(), [](const Vec3& a, const Vec3& b) { return a[2] < b[2]; });

    std::vector<double> fractions;
    fractions.reserve(tols.size());
    std::vector<char> hit(n_samples);
    for (double tol : tols) {
        std::fill(hit.begin(), hit.end(), 0);
        const double cos_tol = std::cos(tol);
        std::set<std::tuple<long long, long long, long long>> seen;
        for (const Candidate& c : candidates) {
            if (c.max_dist > tol) continue;
            const auto key = std::make_tuple(std::llround(c.dir[0] * 1e9), std::llround(c.dir[1] * 1e9),
                                             std::llround(c.dir[2] * 1e9));
            if (!seen.insert(key).second) continue;
            auto lo = std::lower_bound(dirs.begin(), dirs.end(), c.dir[2] - tol,
                                       [](const Vec3& a, double z) { return a[2] < z; });
            for (auto it = lo; it != dirs.end() && (*it)[2] <= c.dir[2] + tol; ++it)
                if (dot(*it, c.dir) >= cos_tol) hit[std::size_t(it - dirs.begin())] = 1;
        }
        if (!flats.empty()) {
            const double sin_tol = std::sin(std::min(tol, 0.5 * kPi));
            for (std::size_t k = 0; k < n_samples; ++k) {
                if (hit[k]) continue;
                for (const FlatPoint& f : flats) {
                    const double normal_part = dot(dirs[k], f.n);
                    if (std::abs(normal_part) > sin_tol) continue;
                    Vec3 wt = dirs[k] - normal_part * f.n;
                    const double len = norm(wt);
                    if (!(len > 0.0)) continue;
                    wt = (1.0 / len) * wt;
                    if (ray_max_distance(patch, f.p, wt, f.u, f.v, opts, tol) <= tol) {
                        hit[k] = 1;
                        break;
                    }
                }
            }
        }
        std::size_t count = 0;
        for (char h : hit) count += std::size_t(h);
        fractions.push_back(double(count) / double(n_samples));
    }
    return fractions;
}

double singular_direction_fraction(const SurfacePatch& patch, std::size_t n_samples, double tol, std::uint64_t seed,
                                   const SingularityOptions& opts) {
    return singular_direction_ladder(patch, n_samples, {tol}, seed, opts).front();
}

JumpStats detect_jumps(const Image2D& img, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("detect_jumps: threshold must be positive");
    JumpStats s;
    auto note = [&](double a, double b) {
        const double d = std::abs(a - b);
        s.max_jump = std::max(s.max_jump, d);
        if (d > threshold) ++s.count;
    };
    for (std::size_t i = 0; i < img.rows(); ++i) {
        for (std::size_t j = 0; j < img.cols(); ++j) {
            if (j + 1 < img.cols()) note(img(i, j), img(i, j + 1));
            if (i + 1 < img.rows()) note(img(i, j), img(i + 1, j));
        }
    }
    return s;
}

std::vector<double> jump_refinement(const Volume3D& vol, Vec3 direction, const std::vector<std::size_t>& detectors,
                                    double width) {
    std::vector<double> out;
    out.reserve(detectors.size());
    for (std::size_t n : detectors) out.push_back(detect_jumps(project_volume(vol, direction, n, width), 1e-12).max_jump);
    return out;
}

}  // namespace tomokl
