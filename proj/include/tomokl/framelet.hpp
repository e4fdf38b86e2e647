#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tomokl/image.hpp"

namespace tomokl {

enum class FrameletKind { Haar, Linear, Cubic };

FrameletKind parse_framelet_kind(std::string_view name);
std::string to_string(FrameletKind kind);

/// 1-D mask applied as a correlation: tap k multiplies the sample at offset
/// (k - origin) * 2^level.
struct Filter {
    std::vector<double> taps;
    int origin = 0;
};

/// Univariate UEP filter bank; filters[0] is the refinement (low-pass) mask.
struct FilterBank {
    FrameletKind kind = FrameletKind::Haar;
    std::vector<Filter> filters;

    std::size_t size() const noexcept { return filters.size(); }
};

FilterBank filter_bank(FrameletKind kind);

/// Undecimated tensor-product coefficients, bands[level][i1 * size + i2]
/// where i1 filters along rows (vertical) and i2 along columns.
///
/// Only the deepest level keeps its low-pass band (0,0); shallower (0,0)
/// planes are zero because they are passed down the cascade instead.
struct FrameCoefficients {
    FrameletKind kind = FrameletKind::Haar;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t bank_size = 0;
    std::vector<std::vector<Image2D>> bands;

    std::size_t levels() const noexcept { return bands.size(); }
    std::size_t bands_per_level() const noexcept { return bank_size * bank_size; }
    Image2D& band(std::size_t level, std::size_t i1, std::size_t i2) { return bands[level][i1 * bank_size + i2]; }
    const Image2D& band(std::size_t level, std::size_t i1, std::size_t i2) const {
        return bands[level][i1 * bank_size + i2];
    }
};

/// Analysis operator W with periodic boundary (a-trous cascade).
FrameCoefficients decompose(const Image2D& img, const FilterBank& bank, std::size_t levels = 1);

/// Synthesis operator W^T, the exact adjoint of `decompose`; W^T W = I.
Image2D reconstruct(const FrameCoefficients& coeffs, const FilterBank& bank);

double norm2(const FrameCoefficients& c);

/// Max |W^T W u - u| over all 32x32 unit impulses at levels 1 and 2.
double verify_uep(const FilterBank& bank);

/// Max |sum_i sum_k a_i[k] a_i[k+m] - delta_m|, the undecimated tight-frame
/// condition on the masks themselves.
double uep_autocorrelation_residual(const FilterBank& bank);

}  // namespace tomokl
