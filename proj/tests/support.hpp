#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "tomokl/config.hpp"
#include "tomokl/image.hpp"

namespace testing {

inline tomokl::Image2D random_image(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0,
                                    double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    tomokl::Image2D img(rows, cols);
    for (double& v : img.data()) v = dist(rng);
    return img;
}

inline double max_abs_diff(const tomokl::Image2D& a, const tomokl::Image2D& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

/// Pilot-run thresholds kept under version control.
inline const tomokl::Config& golden() {
    static const tomokl::Config cfg = tomokl::Config::load(std::string(TOMOKL_GOLDEN_DIR) + "/thresholds.txt");
    return cfg;
}

inline double golden_value(const std::string& key) {
    if (!golden().has(key)) throw std::runtime_error("golden/thresholds.txt lacks " + key);
    return golden().get_double(key, 0.0);
}

}  // namespace testing
