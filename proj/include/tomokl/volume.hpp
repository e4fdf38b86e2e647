#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tomokl/image.hpp"

namespace tomokl {

using Vec3 = std::array<double, 3>;

/// Cubic voxel grid of n^3 piecewise-constant cells tiling [-1, 1]^3.
/// Index order is (ix, iy, iz) with ix fastest.
class Volume3D {
public:
    explicit Volume3D(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    double voxel_size() const noexcept { return 2.0 / double(n_); }
    double& at(std::size_t ix, std::size_t iy, std::size_t iz) noexcept { return data_[(iz * n_ + iy) * n_ + ix]; }
    double at(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept {
        return data_[(iz * n_ + iy) * n_ + ix];
    }
    double center(std::size_t i) const noexcept { return -1.0 + (double(i) + 0.5) * voxel_size(); }

private:
    std::size_t n_;
    std::vector<double> data_;
};

/// Axis-aligned cube [-h, h]^3 of unit density; voxels get their exact
/// volume fraction inside the cube.
Volume3D voxelize_cube(std::size_t n, double half_side);

/// Centered ball of unit density; voxel value is the inside fraction estimated
/// on a `supersample`^3 sub-grid.
Volume3D voxelize_ball(std::size_t n, double radius, std::size_t supersample = 4);

/// Parallel projection of the piecewise-constant volume along `direction`
/// onto an n_det x n_det detector of physical width `width` centered on the
/// origin. Each pixel is the exact line integral through the voxel cells
/// (voxel-traversal intersection lengths).
Image2D project_volume(const Volume3D& vol, Vec3 direction, std::size_t n_det, double width);

}  // namespace tomokl
