#include "tomokl/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tomokl/fft.hpp"

namespace tomokl {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double lerp_row(std::span<const double> row, double t) {
    const double f = std::floor(t);
    const long k = long(f);
    const double w = t - f;
    const long n = long(row.size());
    const double a = (k >= 0 && k < n) ? row[std::size_t(k)] : 0.0;
    const double b = (k + 1 >= 0 && k + 1 < n) ? row[std::size_t(k + 1)] : 0.0;
    return (1.0 - w) * a + w * b;
}

}  // namespace

FbpWindow parse_window(std::string_view name) {
    if (name == "ram-lak" || name == "ramlak") return FbpWindow::RamLak;
    if (name == "hamming") return FbpWindow::Hamming;
    throw std::invalid_argument("unknown FBP window '" + std::string(name) + "' (expected ram-lak or hamming)");
}

std::string to_string(FbpWindow w) { return w == FbpWindow::Hamming ? "hamming" : "ram-lak"; }

void FbpConfig::validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("FbpConfig: output size must be positive");
    if (pixel_spacing < 0.0) throw std::invalid_argument("FbpConfig: pixel spacing must be nonnegative");
}

std::vector<double> ramp_response(std::size_t padded, double spacing, FbpWindow window) {
    // Band-limited ramp from its sampled spatial kernel, which keeps the
    // DC response consistent with the discrete convolution.
    RealFft fft(padded);
    auto h = fft.real();
    std::fill(h.begin(), h.end(), 0.0);
    h[0] = 0.25 / (spacing * spacing);
    for (std::size_t k = 1; k <= padded / 2; ++k) {
        if (k % 2 == 0) continue;
        const double v = -1.0 / (kPi * kPi * double(k) * double(k) * spacing * spacing);
        h[k] = v;
        h[padded - k] = v;
    }
    fft.forward();
    auto spec = fft.spectrum();
    std::vector<double> resp(spec.size());
    const double half = double(padded / 2);
    for (std::size_t l = 0; l < spec.size(); ++l) {
        double r = spec[l].real() * spacing;
        if (window == FbpWindow::Hamming) r *= 0.54 + 0.46 * std::cos(kPi * double(l) / half);
        resp[l] = r;
    }
    return resp;
}

Image2D filter_projections(const Sinogram& sino, FbpWindow window) {
    sino.geometry.validate();
    const std::size_t n_det = sino.geometry.n_detectors;
    const std::size_t padded = next_pow2(2 * n_det);
    const std::vector<double> resp = ramp_response(padded, sino.geometry.detector_spacing, window);
    RealFft fft(padded);
    Image2D out(sino.data.rows(), n_det, sino.data.spacing());
    for (std::size_t a = 0; a < sino.data.rows(); ++a) {
        auto buf = fft.real();
        std::fill(buf.begin(), buf.end(), 0.0);
        auto row = sino.data.row(a);
        std::copy(row.begin(), row.end(), buf.begin());
        fft.forward();
        auto spec = fft.spectrum();
        for (std::size_t l = 0; l < spec.size(); ++l) spec[l] *= resp[l];
        fft.inverse();
        auto dst = out.row(a);
        for (std::size_t k = 0; k < n_det; ++k) dst[k] = buf[k] / double(padded);
    }
    return out;
}

Image2D fbp_parallel(const Sinogram& sino, const FbpConfig& cfg) {
    cfg.validate();
    sino.geometry.validate();
    if (sino.data.rows() != sino.geometry.angles.size() || sino.data.cols() != sino.geometry.n_detectors)
        throw std::invalid_argument("fbp_parallel: data shape does not match geometry");
    if (sino.geometry.angles.size() < 2) throw std::invalid_argument("fbp_parallel: need at least two angles");
    const Image2D filtered = filter_projections(sino, cfg.window);
    const double spacing = cfg.pixel_spacing > 0.0 ? cfg.pixel_spacing : 2.0 / double(std::max(cfg.rows, cfg.cols));
    Image2D img(cfg.rows, cfg.cols, spacing);
    const auto& angles = sino.geometry.angles;
    const double ds = sino.geometry.detector_spacing;
    const double center = 0.5 * (double(sino.geometry.n_detectors) - 1.0);
    std::vector<double> cs(angles.size()), sn(angles.size());
    for (std::size_t a = 0; a < angles.size(); ++a) {
        cs[a] = std::cos(angles[a]) / ds;
        sn[a] = std::sin(angles[a]) / ds;
    }
    const double weight = kPi / double(angles.size());
    const double mask_r2 = std::pow(0.5 * spacing * double(std::min(cfg.rows, cfg.cols)), 2);
    for (std::size_t i = 0; i < cfg.rows; ++i) {
        const double y = img.y_of(double(i));
        for (std::size_t j = 0; j < cfg.cols; ++j) {
            const double x = img.x_of(double(j));
            if (cfg.circle_mask && x * x + y * y > mask_r2) continue;
            double acc = 0.0;
            for (std::size_t a = 0; a < angles.size(); ++a)
                acc += lerp_row(filtered.row(a), x * cs[a] + y * sn[a] + center);
            img(i, j) = acc * weight;
        }
    }
    return img;
}

Sinogram fan_to_parallel(const FanSinogram& fan) {
    const FanGeometry& g = fan.geometry;
    g.validate();
    const std::size_t n_fan = g.angles.size();
    if (fan.data.rows() != n_fan || fan.data.cols() != g.n_detectors)
        throw std::invalid_argument("fan_to_parallel: data shape does not match geometry");
    if (n_fan < 4) throw std::invalid_argument("fan_to_parallel: insufficient angular coverage");
    double max_gap = 2.0 * kPi - g.angles.back() + g.angles.front();
    for (std::size_t a = 1; a < n_fan; ++a) max_gap = std::max(max_gap, g.angles[a] - g.angles[a - 1]);
    if (max_gap > 1.5 * 2.0 * kPi / double(n_fan))
        throw std::invalid_argument("fan_to_parallel: source angles must cover [0, 2 pi) evenly");

    const ParallelGeometry pg = ParallelGeometry::uniform(n_fan / 2, g.n_detectors, g.detector_spacing);
    Sinogram out{pg, Image2D(pg.angles.size(), pg.n_detectors, pg.detector_spacing)};
    const double radius = g.source_radius;
    const double du = g.detector_spacing;
    const double center = 0.5 * (double(g.n_detectors) - 1.0);
    for (std::size_t a = 0; a < pg.angles.size(); ++a) {
        const double theta = pg.angles[a];
        for (std::size_t k = 0; k < pg.n_detectors; ++k) {
            const double s = pg.detector_offset(k);
            if (std::abs(s) >= radius) continue;
            const double u = s * radius / std::sqrt(radius * radius - s * s);
            double beta = std::fmod(theta + std::atan2(u, radius), 2.0 * kPi);
            if (beta < 0.0) beta += 2.0 * kPi;
            // Bracketing source angles, with wrap-around past the last one.
            const auto it = std::upper_bound(g.angles.begin(), g.angles.end(), beta);
            std::size_t hi = std::size_t(it - g.angles.begin()) % n_fan;
            std::size_t lo = (hi + n_fan - 1) % n_fan;
            double a_lo = g.angles[lo];
            double a_hi = g.angles[hi];
            if (a_lo > beta) a_lo -= 2.0 * kPi;
            if (a_hi < beta || (hi == lo)) a_hi += 2.0 * kPi;
            if (a_hi <= a_lo) a_hi += 2.0 * kPi;
            const double w = (beta - a_lo) / (a_hi - a_lo);
            const double t = u / du + center;
            out.data(a, k) = (1.0 - w) * lerp_row(fan.data.row(lo), t) + w * lerp_row(fan.data.row(hi), t);
        }
    }
    return out;
}

Image2D reconstruct_fan(const FanSinogram& fan, const FbpConfig& cfg) { return fbp_parallel(fan_to_parallel(fan), cfg); }

}  // namespace tomokl
