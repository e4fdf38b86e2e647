#pragma once

#include <array>
#include <cstdint>

namespace tomokl {

/// Philox-4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every draw is a pure function of (key, counter), so a stream can be
/// addressed by any index tuple and evaluated in any order.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key) noexcept
        : key_{std::uint32_t(key), std::uint32_t(key >> 32)} {}

    Block operator()(Block ctr) const noexcept {
        std::array<std::uint32_t, 2> k = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k[0] += kWeyl0;
                k[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ k[0], std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ ctr[3] ^ k[1],
                   std::uint32_t(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    std::array<std::uint32_t, 2> key_;
};

/// Sequential uniform draws for one addressed stream (a, b); the n-th call
/// evaluates Philox at counter (a, b, n/2, 0).
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint32_t a, std::uint32_t b) noexcept : gen_(seed), a_(a), b_(b) {}

    /// Uniform double in the open interval (0, 1) with 53 random bits.
    double uniform() noexcept {
        if (used_ == 2) refill();
        const std::uint64_t hi = block_[2 * used_];
        const std::uint64_t lo = block_[2 * used_ + 1];
        ++used_;
        const std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return (double(bits) + 0.5) * 0x1.0p-53;
    }

private:
    void refill() noexcept {
        block_ = gen_({a_, b_, counter_++, 0u});
        used_ = 0;
    }

    Philox4x32 gen_;
    std::uint32_t a_;
    std::uint32_t b_;
    std::uint32_t counter_ = 0;
    Philox4x32::Block block_{};
    int used_ = 2;
};

}  // namespace tomokl
