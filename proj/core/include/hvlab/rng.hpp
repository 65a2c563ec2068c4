#pragma once

#include <array>
#include <cstdint>

#include "hvlab/angle.hpp"

namespace hvlab {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
//
// Streams are keyed by (seed, stream index): the 64-bit seed is the cipher
// key and the stream index occupies the high counter words, so distinct
// streams walk disjoint counter ranges of the same keyed permutation. Runs
// that draw the same stream/offset sequence agree bit for bit regardless of
// how streams are distributed over threads.
class PhiloxRng {
  public:
    PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0, 0, static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)} {}

    // Next 64 random bits.
    std::uint64_t next_u64() {
        if (cache_pos_ >= 2) {
            refill();
        }
        return cache_[cache_pos_++];
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform angle on [0, 2pi).
    Angle uniform_angle() { return Angle(uniform() * kTwoPi); }

    // One Bernoulli draw; deterministic for p in {0, 1} but always consumes
    // exactly one uniform so generic and degenerate models share a stream
    // layout.
    bool bernoulli(double p) { return uniform() < p; }

  private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        std::uint64_t product = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(product >> 32);
        lo = static_cast<std::uint32_t>(product);
    }

    void refill() {
        constexpr std::uint32_t kM0 = 0xD2511F53u;
        constexpr std::uint32_t kM1 = 0xCD9E8D57u;
        constexpr std::uint32_t kW0 = 0x9E3779B9u;
        constexpr std::uint32_t kW1 = 0xBB67AE85u;

        std::array<std::uint32_t, 4> ctr = counter_;
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(kM0, ctr[0], hi0, lo0);
            mulhilo(kM1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        cache_[0] = (static_cast<std::uint64_t>(ctr[0]) << 32) | ctr[1];
        cache_[1] = (static_cast<std::uint64_t>(ctr[2]) << 32) | ctr[3];
        cache_pos_ = 0;

        // 64-bit block counter; the stream index in words 2..3 is never touched.
        if (++counter_[0] == 0) {
            ++counter_[1];
        }
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint64_t, 2> cache_{};
    int cache_pos_ = 2;
};

}  // namespace hvlab
