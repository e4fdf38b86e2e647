#include "tomokl/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tomokl {

Image2D::Image2D(std::size_t rows, std::size_t cols, double spacing, double fill)
    : rows_(rows), cols_(cols), spacing_(spacing), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Image2D: rows and cols must be positive");
    set_spacing(spacing);
}

Image2D::Image2D(std::size_t rows, std::size_t cols, std::vector<double> data, double spacing)
    : rows_(rows), cols_(cols), spacing_(spacing), data_(std::move(data)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Image2D: rows and cols must be positive");
    if (data_.size() != rows * cols) throw std::invalid_argument("Image2D: data length must equal rows*cols");
    set_spacing(spacing);
}

void Image2D::set_spacing(double spacing) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("Image2D: pixel spacing must be positive and finite");
    spacing_ = spacing;
}

double Image2D::support_radius() const noexcept {
    return 0.5 * spacing_ * std::hypot(double(rows_), double(cols_));
}

bool Image2D::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const Image2D& a, const Image2D& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
}

Image2D operator+(const Image2D& a, const Image2D& b) {
    require_same_shape(a, b, "operator+");
    Image2D out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] += bd[k];
    return out;
}

Image2D operator-(const Image2D& a, const Image2D& b) {
    require_same_shape(a, b, "operator-");
    Image2D out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] -= bd[k];
    return out;
}

Image2D operator*(double s, const Image2D& a) {
    Image2D out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

double dot(const Image2D& a, const Image2D& b) {
    require_same_shape(a, b, "dot");
    auto ad = a.data();
    auto bd = b.data();
    return std::inner_product(ad.begin(), ad.end(), bd.begin(), 0.0);
}

double norm2(const Image2D& a) { return std::sqrt(dot(a, a)); }

double sum(const Image2D& a) {
    auto d = a.data();
    return std::accumulate(d.begin(), d.end(), 0.0);
}

double min_value(const Image2D& a) {
    auto d = a.data();
    return *std::min_element(d.begin(), d.end());
}

double max_value(const Image2D& a) {
    auto d = a.data();
    return *std::max_element(d.begin(), d.end());
}

}  // namespace tomokl
