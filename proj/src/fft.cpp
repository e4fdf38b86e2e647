#include "tomokl/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <stdexcept>

namespace tomokl {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct RealFft::Impl {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::size_t n_real = 0;
    std::size_t n_spec = 0;

    Impl(std::size_t rows, std::size_t cols, bool two_d) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("RealFft: empty transform");
        n_real = rows * cols;
        n_spec = rows * (cols / 2 + 1);
        real = fftw_alloc_real(n_real);
        spec = fftw_alloc_complex(n_spec);
        if (!real || !spec) {
            release();
            throw std::bad_alloc();
        }
        std::lock_guard lock(planner_mutex());
        if (two_d) {
            fwd = fftw_plan_dft_r2c_2d(int(rows), int(cols), real, spec, FFTW_ESTIMATE);
            inv = fftw_plan_dft_c2r_2d(int(rows), int(cols), spec, real, FFTW_ESTIMATE);
        } else {
            fwd = fftw_plan_dft_r2c_1d(int(cols), real, spec, FFTW_ESTIMATE);
            inv = fftw_plan_dft_c2r_1d(int(cols), spec, real, FFTW_ESTIMATE);
        }
        if (!fwd || !inv) {
            release_locked();
            throw std::runtime_error("RealFft: FFTW planning failed");
        }
    }

    void release_locked() {
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        fwd = inv = nullptr;
        release();
    }

    void release() {
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
        real = nullptr;
        spec = nullptr;
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        release_locked();
    }
};

RealFft::RealFft(std::size_t n) : impl_(std::make_unique<Impl>(1, n, false)), rows_(1), cols_(n) {}

RealFft::RealFft(std::size_t rows, std::size_t cols)
    : impl_(std::make_unique<Impl>(rows, cols, true)), rows_(rows), cols_(cols) {}

RealFft::~RealFft() = default;

std::span<double> RealFft::real() noexcept { return {impl_->real, impl_->n_real}; }

std::span<std::complex<double>> RealFft::spectrum() noexcept {
    return {reinterpret_cast<std::complex<double>*>(impl_->spec), impl_->n_spec};
}

void RealFft::forward() { fftw_execute(impl_->fwd); }

// c2r transforms overwrite their input; callers refill the spectrum each time.
void RealFft::inverse() { fftw_execute(impl_->inv); }

}  // namespace tomokl
