#pragma once

#include <cstdint>

#include "tomokl/counter_rng.hpp"
#include "tomokl/image.hpp"
#include "tomokl/projector.hpp"

namespace tomokl {

/// Photon-count noise model: an entry y becomes k / dose with k ~ Poisson(y * dose).
/// An infinite dose is the noiseless limit and returns the data unchanged.
struct NoiseSpec {
    double dose = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Exact Poisson sample. Inversion by sequential search for mean < 30,
/// Hormann's PTRS transformed rejection otherwise.
std::uint64_t sample_poisson(double mean, CounterStream& stream);

/// Entry (i, j) is drawn from the stream keyed by (seed, i, j), so the result
/// depends only on the data, dose and seed.
Image2D add_poisson(const Image2D& data, const NoiseSpec& spec);
Sinogram add_poisson(const Sinogram& sino, const NoiseSpec& spec);
FanSinogram add_poisson(const FanSinogram& sino, const NoiseSpec& spec);

}  // namespace tomokl
