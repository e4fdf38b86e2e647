#include "tomokl/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace tomokl {

void NoiseSpec::validate() const {
    if (!(dose > 0.0) || std::isnan(dose)) throw std::invalid_argument("NoiseSpec: dose must be positive");
}

namespace {

std::uint64_t poisson_inversion(double mean, CounterStream& stream) {
    const double u = stream.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf) {
        ++k;
        p *= mean / double(k);
        cdf += p;
        // Guards the tail against rounding in the accumulated cdf.
        if (p == 0.0 && double(k) > mean) break;
    }
    return k;
}

std::uint64_t poisson_ptrs(double mean, CounterStream& stream) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = stream.uniform() - 0.5;
        const double v = stream.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return std::uint64_t(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0))
            return std::uint64_t(k);
    }
}

void require_nonnegative(const Image2D& data) {
    for (double v : data.data())
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("add_poisson: entries must be finite and nonnegative");
}

}  // namespace

std::uint64_t sample_poisson(double mean, CounterStream& stream) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("sample_poisson: invalid mean");
    if (mean == 0.0) return 0;
    return mean < 30.0 ? poisson_inversion(mean, stream) : poisson_ptrs(mean, stream);
}

Image2D add_poisson(const Image2D& data, const NoiseSpec& spec) {
    spec.validate();
    require_nonnegative(data);
    Image2D out = data;
    if (std::isinf(spec.dose)) return out;  // k / s -> y as s -> infinity
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t j = 0; j < data.cols(); ++j) {
            CounterStream stream(spec.seed, std::uint32_t(i), std::uint32_t(j));
            out(i, j) = double(sample_poisson(data(i, j) * spec.dose, stream)) / spec.dose;
        }
    return out;
}

Sinogram add_poisson(const Sinogram& sino, const NoiseSpec& spec) {
    return {sino.geometry, add_poisson(sino.data, spec)};
}

FanSinogram add_poisson(const FanSinogram& sino, const NoiseSpec& spec) {
    return {sino.geometry, add_poisson(sino.data, spec)};
}

}  // namespace tomokl
