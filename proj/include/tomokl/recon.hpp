#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tomokl/image.hpp"
#include "tomokl/projector.hpp"

namespace tomokl {

enum class FbpWindow { RamLak, Hamming };

FbpWindow parse_window(std::string_view name);
std::string to_string(FbpWindow w);

struct FbpConfig {
    FbpWindow window = FbpWindow::RamLak;
    std::size_t rows = 256;
    std::size_t cols = 256;
    double pixel_spacing = 0.0;  // 0 selects 2 / max(rows, cols)
    bool circle_mask = false;    // zero pixels outside the inscribed circle

    void validate() const;
};

/// Frequency response (already scaled by the detector spacing) applied to a
/// zero-padded projection of length `padded`; entries cover 0..padded/2.
std::vector<double> ramp_response(std::size_t padded, double detector_spacing, FbpWindow window);

/// Ramp-filters each view (zero padding to the next power of two >= 2 n_det).
Image2D filter_projections(const Sinogram& sino, FbpWindow window);

/// Filtered backprojection with linear detector interpolation.
Image2D fbp_parallel(const Sinogram& sino, const FbpConfig& cfg);

/// Rebins flat-detector fan data onto a parallel grid of n_angles/2 views over
/// [0, pi), interpolating bilinearly in (source angle, detector offset).
Sinogram fan_to_parallel(const FanSinogram& fan);

Image2D reconstruct_fan(const FanSinogram& fan, const FbpConfig& cfg);

}  // namespace tomokl
