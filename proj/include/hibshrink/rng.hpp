#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace hibshrink {

// SplitMix64, used to seed and to derive independent stream keys.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t operator()()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

// xoshiro256** seeded through SplitMix64. Satisfies UniformRandomBitGenerator.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed)
    {
        SplitMix64 sm(seed);
        for (auto& w : s_) {
            w = sm();
        }
    }

    /// Independent stream for a (seed, id...) key, e.g. (seed, grid index,
    /// estimator). Keys are folded through SplitMix64 one component at a time.
    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
    {
        return Rng(derive(seed, ids));
    }

    static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
    {
        std::uint64_t key = SplitMix64(seed)();
        for (std::uint64_t id : ids) {
            key = SplitMix64(key ^ (id + 0x632be59bd9b4e019ull))();
        }
        return key;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1).
    double uniform()
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

}  // namespace hibshrink
