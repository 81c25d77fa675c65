#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

namespace fris {

/// Counter-free splittable random stream (splitmix64 stepping).
///
/// Chosen over std::mt19937_64 because the simulation derives a fresh
/// sub-stream per (trial, iteration, sample) and needs seeding to be
/// free and the output sequence to be identical on every platform.
/// Satisfies UniformRandomBitGenerator.
class rng_stream {
  public:
    using result_type = std::uint64_t;

    explicit rng_stream(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from (base, index). Used to split a
/// master seed into per-trial / per-scheme / per-candidate sub-streams so
/// results do not depend on evaluation order or scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    rng_stream mix(base ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    return mix();
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i,
                                 std::uint64_t j) noexcept {
    return derive_seed(derive_seed(base, i), j);
}

/// Uniform draw in [0, 1) with 53-bit resolution.
inline double uniform01(rng_stream& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// One Box-Muller pair of independent standard normals.
inline std::pair<double, double> normal_pair(rng_stream& rng) noexcept {
    const double u1 = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53; // (0,1]
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

/// Standard circularly symmetric complex Gaussian, CN(0, 1).
inline std::complex<double> complex_normal(rng_stream& rng) noexcept {
    const auto [re, im] = normal_pair(rng);
    return {re * M_SQRT1_2, im * M_SQRT1_2};
}

} // namespace fris
