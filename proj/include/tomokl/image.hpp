#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tomokl {

/// Dense row-major M x N grid of doubles with a physical pixel spacing.
///
/// The world frame is centered on the grid: column j sits at
/// x = (j - (N-1)/2) * spacing and row i at y = ((M-1)/2 - i) * spacing,
/// so row 0 is the top of the image.
class Image2D {
public:
    Image2D() = default;
    Image2D(std::size_t rows, std::size_t cols, double spacing = 1.0, double fill = 0.0);
    Image2D(std::size_t rows, std::size_t cols, std::vector<double> data, double spacing = 1.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    double spacing() const noexcept { return spacing_; }
    void set_spacing(double spacing);

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    double x_of(double col) const noexcept { return (col - 0.5 * (double(cols_) - 1.0)) * spacing_; }
    double y_of(double row) const noexcept { return (0.5 * (double(rows_) - 1.0) - row) * spacing_; }

    /// Radius of the circle circumscribing the pixel grid (pixel edges included).
    double support_radius() const noexcept;

    bool same_shape(const Image2D& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    double spacing_ = 1.0;
    std::vector<double> data_;
};

void require_same_shape(const Image2D& a, const Image2D& b, const char* what);

// Elementwise helpers used across modules.
Image2D operator+(const Image2D& a, const Image2D& b);
Image2D operator-(const Image2D& a, const Image2D& b);
Image2D operator*(double s, const Image2D& a);

double dot(const Image2D& a, const Image2D& b);
double norm2(const Image2D& a);
double sum(const Image2D& a);
double min_value(const Image2D& a);
double max_value(const Image2D& a);

}  // namespace tomokl
