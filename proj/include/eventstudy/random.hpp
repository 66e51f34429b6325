#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace eventstudy {

// SplitMix64 (Steele, Lea & Flood). Used to expand seeds and to derive
// per-trial stream seeds.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

// Stream-splitting rule: the seed for trial `index` is the (index + 1)-th
// output of a SplitMix64 generator started at `master_seed`. Computed in O(1).
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

// xoshiro256** 1.0 (Blackman & Vigna). State is filled from four successive
// SplitMix64 outputs of the seed.
class Xoshiro256StarStar {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256StarStar(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    // Uniform on [0, 1) with 53 random bits: (x >> 11) * 2^-53.
    double uniform() noexcept;

  private:
    std::array<std::uint64_t, 4> s_{};
};

// Standard normal draws by the basic Box-Muller transform. Each pair of
// uniforms (u1, u2) yields sqrt(-2 ln(1 - u1)) * cos(2 pi u2) first and the
// matching sin() value on the following call.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) noexcept : engine_(seed) {}

    double operator()() noexcept;
    double operator()(double mean, double sd) noexcept { return mean + sd * (*this)(); }

    Xoshiro256StarStar& engine() noexcept { return engine_; }

  private:
    Xoshiro256StarStar engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace eventstudy
