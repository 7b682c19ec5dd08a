#pragma once

#include <array>
#include <cstdint>

// Portable random streams. Every value produced here is a pure function of the
// seed, so streams reproduce bit-for-bit across compilers and platforms.
//
//   * SplitMix64 (Steele, Lea, Flood 2014): seeding and seed derivation.
//     Increment 0x9E3779B97F4A7C15, mix constants 0xBF58476D1CE4E5B9 and
//     0x94D049BB133111EB, shifts 30/27/31.
//   * xoshiro256** (Blackman, Vigna 2018): the sample stream.
//   * Uniforms: top 53 bits, offset by half an ulp, so they lie in (0, 1).
//   * Normals: inverse CDF by Wichura's AS241 (PPND16) rational approximation,
//     one uniform per normal.

namespace covpen {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

private:
    std::uint64_t state_;
};

/// Seed of stream `stream` under master seed `master`; distinct streams get
/// statistically independent seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    std::uint64_t operator()() { return next(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal.
    double normal();
    /// Uniform integer in [0, n). Uses Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n);

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Standard normal quantile, AS241 (PPND16); about 1e-16 relative accuracy.
double normal_quantile(double p);

}  // namespace covpen
