#include "tomokl/framelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tomokl {

FrameletKind parse_framelet_kind(std::string_view name) {
    if (name == "haar") return FrameletKind::Haar;
    if (name == "linear") return FrameletKind::Linear;
    if (name == "cubic") return FrameletKind::Cubic;
    throw std::invalid_argument("unknown framelet kind '" + std::string(name) + "' (expected haar, linear or cubic)");
}

std::string to_string(FrameletKind kind) {
    switch (kind) {
        case FrameletKind::Haar: return "haar";
        case FrameletKind::Linear: return "linear";
        case FrameletKind::Cubic: return "cubic";
    }
    return "?";
}

FilterBank filter_bank(FrameletKind kind) {
    FilterBank bank{kind, {}};
    auto scaled = [](double s, std::vector<double> v) {
        for (double& x : v) x *= s;
        return v;
    };
    switch (kind) {
        case FrameletKind::Haar:
            // Even length: anchored at the left tap.
            bank.filters = {{{0.5, 0.5}, 0}, {{0.5, -0.5}, 0}};
            break;
        case FrameletKind::Linear:
            bank.filters = {{scaled(0.25, {1, 2, 1}), 1},
                            {scaled(std::sqrt(2.0) / 4.0, {1, 0, -1}), 1},
                            {scaled(0.25, {-1, 2, -1}), 1}};
            break;
        case FrameletKind::Cubic:
            bank.filters = {{scaled(1.0 / 16.0, {1, 4, 6, 4, 1}), 2},
                            {scaled(1.0 / 8.0, {-1, -2, 0, 2, 1}), 2},
                            {scaled(std::sqrt(6.0) / 16.0, {1, 0, -2, 0, 1}), 2},
                            {scaled(1.0 / 8.0, {-1, 2, 0, -2, 1}), 2},
                            {scaled(1.0 / 16.0, {1, -4, 6, -4, 1}), 2}};
            break;
        default: throw std::invalid_argument("filter_bank: unknown kind");
    }
    return bank;
}

namespace {

std::size_t wrap(long s, std::size_t n) {
    const long m = long(n);
    return std::size_t(((s % m) + m) % m);
}

// out[j] += a * in[(j + s) mod n]
void axpy_shift(double* out, const double* in, std::size_t n, double a, std::size_t s) {
    const std::size_t head = n - s;
    for (std::size_t j = 0; j < head; ++j) out[j] += a * in[j + s];
    for (std::size_t j = head; j < n; ++j) out[j] += a * in[j + s - n];
}

// Correlation along columns (j axis). `adjoint` applies the reflected kernel.
void filter_cols(const Image2D& in, const Filter& f, std::size_t hole, bool adjoint, Image2D& out) {
    const std::size_t n = in.cols();
    for (std::size_t k = 0; k < f.taps.size(); ++k) {
        if (f.taps[k] == 0.0) continue;
        long off = (long(k) - f.origin) * long(hole);
        if (adjoint) off = -off;
        const std::size_t s = wrap(off, n);
        for (std::size_t i = 0; i < in.rows(); ++i) axpy_shift(out.row(i).data(), in.row(i).data(), n, f.taps[k], s);
    }
}

// Correlation along rows (i axis).
void filter_rows(const Image2D& in, const Filter& f, std::size_t hole, bool adjoint, Image2D& out) {
    const std::size_t m = in.rows();
    const std::size_t n = in.cols();
    for (std::size_t k = 0; k < f.taps.size(); ++k) {
        const double a = f.taps[k];
        if (a == 0.0) continue;
        long off = (long(k) - f.origin) * long(hole);
        if (adjoint) off = -off;
        const std::size_t s = wrap(off, m);
        for (std::size_t i = 0; i < m; ++i) {
            const double* src = in.row((i + s) % m).data();
            double* dst = out.row(i).data();
            for (std::size_t j = 0; j < n; ++j) dst[j] += a * src[j];
        }
    }
}

// One undecimated level: all (r+1)^2 tensor bands of `in`.
std::vector<Image2D> analyze_level(const Image2D& in, const FilterBank& bank, std::size_t hole) {
    const std::size_t r1 = bank.size();
    std::vector<Image2D> bands;
    bands.reserve(r1 * r1);
    for (std::size_t i = 0; i < r1 * r1; ++i) bands.emplace_back(in.rows(), in.cols(), in.spacing());
    Image2D tmp(in.rows(), in.cols(), in.spacing());
    for (std::size_t i2 = 0; i2 < r1; ++i2) {
        std::fill(tmp.data().begin(), tmp.data().end(), 0.0);
        filter_cols(in, bank.filters[i2], hole, false, tmp);
        for (std::size_t i1 = 0; i1 < r1; ++i1) filter_rows(tmp, bank.filters[i1], hole, false, bands[i1 * r1 + i2]);
    }
    return bands;
}

// Adjoint of analyze_level; `low` replaces band (0,0).
Image2D synthesize_level(const std::vector<Image2D>& bands, const Image2D& low, const FilterBank& bank,
                         std::size_t hole) {
    const std::size_t r1 = bank.size();
    Image2D out(low.rows(), low.cols(), low.spacing());
    Image2D tmp(low.rows(), low.cols(), low.spacing());
    for (std::size_t i2 = 0; i2 < r1; ++i2) {
        std::fill(tmp.data().begin(), tmp.data().end(), 0.0);
        for (std::size_t i1 = 0; i1 < r1; ++i1) {
            const Image2D& src = (i1 == 0 && i2 == 0) ? low : bands[i1 * r1 + i2];
            filter_rows(src, bank.filters[i1], hole, true, tmp);
        }
        filter_cols(tmp, bank.filters[i2], hole, true, out);
    }
    return out;
}

}  // namespace

FrameCoefficients decompose(const Image2D& img, const FilterBank& bank, std::size_t levels) {
    if (levels < 1) throw std::invalid_argument("decompose: levels must be at least 1");
    if (img.empty()) throw std::invalid_argument("decompose: empty image");
    FrameCoefficients c{bank.kind, img.rows(), img.cols(), bank.size(), {}};
    Image2D current = img;
    std::size_t hole = 1;
    for (std::size_t level = 0; level < levels; ++level, hole *= 2) {
        c.bands.push_back(analyze_level(current, bank, hole));
        if (level + 1 < levels) {
            current = std::move(c.bands.back()[0]);
            c.bands.back()[0] = Image2D(img.rows(), img.cols(), img.spacing());
        }
    }
    return c;
}

Image2D reconstruct(const FrameCoefficients& coeffs, const FilterBank& bank) {
    if (coeffs.kind != bank.kind || coeffs.bank_size != bank.size())
        throw std::invalid_argument("reconstruct: coefficients were produced by a different filter bank");
    if (coeffs.levels() == 0) throw std::invalid_argument("reconstruct: no levels");
    for (const auto& level : coeffs.bands) {
        if (level.size() != coeffs.bands_per_level())
            throw std::invalid_argument("reconstruct: wrong band count per level");
        for (const auto& b : level)
            if (b.rows() != coeffs.rows || b.cols() != coeffs.cols)
                throw std::invalid_argument("reconstruct: band shape mismatch");
    }
    std::size_t hole = std::size_t(1) << (coeffs.levels() - 1);
    Image2D low = coeffs.bands.back()[0];
    for (std::size_t level = coeffs.levels(); level-- > 0; hole /= 2)
        low = synthesize_level(coeffs.bands[level], low, bank, hole);
    return low;
}

double norm2(const FrameCoefficients& c) {
    double acc = 0.0;
    for (const auto& level : c.bands)
        for (const auto& b : level) acc += dot(b, b);
    return std::sqrt(acc);
}

double verify_uep(const FilterBank& bank) {
    constexpr std::size_t n = 32;
    double worst = 0.0;
    for (std::size_t levels = 1; levels <= 2; ++levels)
        for (std::size_t p = 0; p < n * n; ++p) {
            Image2D delta(n, n);
            delta.data()[p] = 1.0;
            const Image2D back = reconstruct(decompose(delta, bank, levels), bank);
            auto d = back.data();
            for (std::size_t k = 0; k < d.size(); ++k)
                worst = std::max(worst, std::abs(d[k] - (k == p ? 1.0 : 0.0)));
        }
    return worst;
}

double uep_autocorrelation_residual(const FilterBank& bank) {
    std::size_t len = 0;
    for (const auto& f : bank.filters) len = std::max(len, f.taps.size());
    double worst = 0.0;
    for (long m = -long(len) + 1; m < long(len); ++m) {
        double acc = 0.0;
        for (const auto& f : bank.filters)
            for (long k = 0; k < long(f.taps.size()); ++k) {
                const long k2 = k + m;
                if (k2 >= 0 && k2 < long(f.taps.size())) acc += f.taps[std::size_t(k)] * f.taps[std::size_t(k2)];
            }
        worst = std::max(worst, std::abs(acc - (m == 0 ? 1.0 : 0.0)));
    }
    return worst;
}

}  // namespace tomokl
