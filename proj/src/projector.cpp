#include "tomokl/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tomokl {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_angles(const std::vector<double>& angles, double span, const char* who) {
    if (angles.empty()) throw std::invalid_argument(std::string(who) + ": no angles");
    for (std::size_t k = 0; k < angles.size(); ++k) {
        if (!(angles[k] >= 0.0 && angles[k] < span))
            throw std::invalid_argument(std::string(who) + ": angle out of range");
        if (k > 0 && !(angles[k] > angles[k - 1]))
            throw std::invalid_argument(std::string(who) + ": angles must be strictly increasing");
    }
}

std::vector<double> uniform_angles(std::size_t n, double span) {
    std::vector<double> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = span * double(k) / double(n);
    return a;
}

// Bilinear interpolant with zero extension outside the pixel grid.
double bilinear(const Image2D& img, double x, double y) {
    const double fj = x / img.spacing() + 0.5 * (double(img.cols()) - 1.0);
    const double fi = 0.5 * (double(img.rows()) - 1.0) - y / img.spacing();
    const double j0f = std::floor(fj);
    const double i0f = std::floor(fi);
    const double wj = fj - j0f;
    const double wi = fi - i0f;
    const long j0 = long(j0f);
    const long i0 = long(i0f);
    const long m = long(img.rows());
    const long n = long(img.cols());
    auto at = [&](long i, long j) -> double {
        if (i < 0 || j < 0 || i >= m || j >= n) return 0.0;
        return img(std::size_t(i), std::size_t(j));
    };
    return (1.0 - wi) * ((1.0 - wj) * at(i0, j0) + wj * at(i0, j0 + 1)) +
           wi * ((1.0 - wj) * at(i0 + 1, j0) + wj * at(i0 + 1, j0 + 1));
}

std::string angles_value(const std::vector<double>& angles, double span) {
    const auto uni = uniform_angles(angles.size(), span);
    if (uni == angles) return "uniform";
    std::ostringstream os;
    for (std::size_t k = 0; k < angles.size(); ++k) os << (k ? "," : "") << format_real(angles[k]);
    return os.str();
}

std::vector<double> parse_angles(const std::string& value, std::size_t n, double span) {
    if (value.empty() || value == "uniform") return uniform_angles(n, span);
    std::vector<double> out;
    std::istringstream is(value);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    if (out.size() != n) throw std::runtime_error("sidecar: angle list length does not match n_angles");
    return out;
}

const std::string& require_key(const KeyValues& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("sidecar: missing key '" + key + "'");
    return it->second;
}

}  // namespace

ParallelGeometry ParallelGeometry::uniform(std::size_t n_angles, std::size_t n_det, double spacing) {
    ParallelGeometry g{uniform_angles(n_angles, kPi), n_det, spacing};
    g.validate();
    return g;
}

void ParallelGeometry::validate() const {
    if (n_detectors < 1) throw std::invalid_argument("ParallelGeometry: need at least one detector");
    if (!(detector_spacing > 0.0)) throw std::invalid_argument("ParallelGeometry: detector spacing must be positive");
    validate_angles(angles, kPi, "ParallelGeometry");
}

FanGeometry FanGeometry::uniform(std::size_t n_angles, std::size_t n_det, double spacing, double radius) {
    FanGeometry g{radius, uniform_angles(n_angles, 2.0 * kPi), n_det, spacing};
    g.validate();
    return g;
}

Vec2 FanGeometry::source(double beta) const noexcept {
    return {source_radius * std::sin(beta), -source_radius * std::cos(beta)};
}

Vec2 FanGeometry::detector_point(double beta, double u) const noexcept {
    return {u * std::cos(beta), u * std::sin(beta)};
}

void FanGeometry::validate() const {
    if (!(source_radius > 0.0) || !std::isfinite(source_radius))
        throw std::invalid_argument("FanGeometry: source radius must be positive and finite");
    if (n_detectors < 1) throw std::invalid_argument("FanGeometry: need at least one detector");
    if (!(detector_spacing > 0.0)) throw std::invalid_argument("FanGeometry: detector spacing must be positive");
    validate_angles(angles, 2.0 * kPi, "FanGeometry");
}

ParallelGeometry default_parallel_geometry(double support_radius, std::size_t n_angles, std::size_t n_det) {
    return ParallelGeometry::uniform(n_angles, n_det, 1.1 * 2.0 * support_radius / double(n_det));
}

FanGeometry default_fan_geometry(double support_radius, std::size_t n_angles, std::size_t n_det, double source_radius) {
    if (!(source_radius > support_radius))
        throw std::invalid_argument("default_fan_geometry: source must lie outside the support circle");
    // Half-width of the support circle's shadow on the isocentric detector line.
    const double u_max = source_radius * support_radius /
                         std::sqrt(source_radius * source_radius - support_radius * support_radius);
    return FanGeometry::uniform(n_angles, n_det, 1.1 * 2.0 * u_max / double(n_det), source_radius);
}

double march_ray(const Image2D& img, Vec2 origin, Vec2 dir, double t_min, double t_max) {
    // Clip to the box where the bilinear interpolant can be nonzero.
    const double hx = 0.5 * double(img.cols() + 1) * img.spacing();
    const double hy = 0.5 * double(img.rows() + 1) * img.spacing();
    double t0 = t_min, t1 = t_max;
    const double lo[2] = {-hx, -hy};
    const double hi[2] = {hx, hy};
    for (int a = 0; a < 2; ++a) {
        if (dir[a] == 0.0) {
            if (origin[a] <= lo[a] || origin[a] >= hi[a]) return 0.0;
            continue;
        }
        double ta = (lo[a] - origin[a]) / dir[a];
        double tb = (hi[a] - origin[a]) / dir[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (!(t1 > t0)) return 0.0;
    const double max_step = 0.5 * img.spacing();
    const auto steps = std::size_t(std::ceil((t1 - t0) / max_step));
    const double step = (t1 - t0) / double(steps);
    double acc = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + (double(k) + 0.5) * step;
        acc += bilinear(img, origin[0] + t * dir[0], origin[1] + t * dir[1]);
    }
    return acc * step;
}

Sinogram parallel_project(const Image2D& img, const ParallelGeometry& geom) {
    geom.validate();
    if (img.empty() || !img.all_finite()) throw std::invalid_argument("parallel_project: image must be finite");
    const double inf = std::numeric_limits<double>::infinity();
    Sinogram out{geom, Image2D(geom.angles.size(), geom.n_detectors, geom.detector_spacing)};
    for (std::size_t a = 0; a < geom.angles.size(); ++a) {
        const double c = std::cos(geom.angles[a]);
        const double s = std::sin(geom.angles[a]);
        for (std::size_t k = 0; k < geom.n_detectors; ++k) {
            const double off = geom.detector_offset(k);
            out.data(a, k) = march_ray(img, {off * c, off * s}, {-s, c}, -inf, inf);
        }
    }
    return out;
}

FanSinogram fan_project(const Image2D& img, const FanGeometry& geom) {
    geom.validate();
    if (img.empty() || !img.all_finite()) throw std::invalid_argument("fan_project: image must be finite");
    if (!(geom.source_radius > img.support_radius()))
        throw std::invalid_argument("fan_project: source must lie outside the image support circle");
    FanSinogram out{geom, Image2D(geom.angles.size(), geom.n_detectors, geom.detector_spacing)};
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < geom.angles.size(); ++a) {
        const double beta = geom.angles[a];
        const Vec2 q = geom.source(beta);
        for (std::size_t k = 0; k < geom.n_detectors; ++k) {
            const Vec2 p = geom.detector_point(beta, geom.detector_offset(k));
            const double dx = p[0] - q[0], dy = p[1] - q[1];
            const double len = std::hypot(dx, dy);
            out.data(a, k) = march_ray(img, q, {dx / len, dy / len}, 0.0, inf);
        }
    }
    return out;
}

Sinogram analytic_parallel_sinogram(const EllipsePhantom& phantom, const ParallelGeometry& geom) {
    geom.validate();
    Sinogram out{geom, Image2D(geom.angles.size(), geom.n_detectors, geom.detector_spacing)};
    for (std::size_t a = 0; a < geom.angles.size(); ++a) {
        const double c = std::cos(geom.angles[a]);
        const double s = std::sin(geom.angles[a]);
        for (std::size_t k = 0; k < geom.n_detectors; ++k) {
            const double off = geom.detector_offset(k);
            out.data(a, k) = analytic_line_integral(phantom, {off * c, off * s}, {-s, c});
        }
    }
    return out;
}

FanSinogram analytic_fan_sinogram(const EllipsePhantom& phantom, const FanGeometry& geom) {
    geom.validate();
    FanSinogram out{geom, Image2D(geom.angles.size(), geom.n_detectors, geom.detector_spacing)};
    for (std::size_t a = 0; a < geom.angles.size(); ++a) {
        const double beta = geom.angles[a];
        const Vec2 q = geom.source(beta);
        for (std::size_t k = 0; k < geom.n_detectors; ++k) {
            const Vec2 p = geom.detector_point(beta, geom.detector_offset(k));
            out.data(a, k) = analytic_half_line_integral(phantom, q, {p[0] - q[0], p[1] - q[1]});
        }
    }
    return out;
}

KeyValues geometry_keys(const ParallelGeometry& g) {
    return {{"kind", "parallel"},
            {"n_angles", std::to_string(g.angles.size())},
            {"n_detectors", std::to_string(g.n_detectors)},
            {"spacing", format_real(g.detector_spacing)},
            {"angles", angles_value(g.angles, kPi)}};
}

KeyValues geometry_keys(const FanGeometry& g) {
    return {{"kind", "fan"},
            {"n_angles", std::to_string(g.angles.size())},
            {"n_detectors", std::to_string(g.n_detectors)},
            {"spacing", format_real(g.detector_spacing)},
            {"source_radius", format_real(g.source_radius)},
            {"angles", angles_value(g.angles, 2.0 * kPi)}};
}

void write_sinogram(const std::filesystem::path& path, const Sinogram& s) {
    write_rm2(path, s.data);
    write_key_values(sidecar_path(path), geometry_keys(s.geometry));
}

void write_sinogram(const std::filesystem::path& path, const FanSinogram& s) {
    write_rm2(path, s.data);
    write_key_values(sidecar_path(path), geometry_keys(s.geometry));
}

AnySinogram read_sinogram(const std::filesystem::path& path) {
    const KeyValues kv = read_key_values(sidecar_path(path));
    const std::string& kind = require_key(kv, "kind");
    const auto n_angles = std::size_t(std::stoull(require_key(kv, "n_angles")));
    const auto n_det = std::size_t(std::stoull(require_key(kv, "n_detectors")));
    const double spacing = std::stod(require_key(kv, "spacing"));
    const std::string angles = kv.count("angles") ? kv.at("angles") : std::string("uniform");
    Image2D data = read_rm2(path, spacing);
    if (data.rows() != n_angles || data.cols() != n_det)
        throw std::runtime_error("read_sinogram: matrix shape does not match sidecar geometry");
    if (kind == "parallel") {
        ParallelGeometry g{parse_angles(angles, n_angles, kPi), n_det, spacing};
        g.validate();
        return Sinogram{std::move(g), std::move(data)};
    }
    if (kind == "fan") {
        FanGeometry g{std::stod(require_key(kv, "source_radius")), parse_angles(angles, n_angles, 2.0 * kPi), n_det,
                      spacing};
        g.validate();
        return FanSinogram{std::move(g), std::move(data)};
    }
    throw std::runtime_error("read_sinogram: unknown kind '" + kind + "'");
}

}  // namespace tomokl
