#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace tomokl {

/// Real-to-complex / complex-to-real FFTW plan pair over owned, aligned
/// buffers. Plans use FFTW_ESTIMATE so they do not depend on timing.
/// `shape` is {n} for 1-D or {rows, cols} for 2-D transforms.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    RealFft(std::size_t rows, std::size_t cols);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::span<double> real() noexcept;
    std::span<std::complex<double>> spectrum() noexcept;
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    /// Width of the half spectrum along the last axis, cols / 2 + 1.
    std::size_t spectrum_cols() const noexcept { return cols_ / 2 + 1; }

    void forward();
    /// Unnormalized inverse: the round trip scales by rows * cols.
    void inverse();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t rows_;
    std::size_t cols_;
};

}  // namespace tomokl
