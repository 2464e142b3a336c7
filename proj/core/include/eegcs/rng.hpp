#pragma once

#include <cstdint>
#include <random>

namespace eegcs {

/// Seedable generator with a fixed, platform-independent normal variate.
///
/// Bits come from std::mt19937_64, whose output sequence is pinned by the
/// standard. Uniforms take the top 53 bits of a draw. Normals use the
/// Marsaglia polar method on two uniforms in (-1, 1), returning both
/// variates of each accepted pair in order. std::normal_distribution is
/// avoided because its algorithm is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform();

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// splitmix64 finalizer; used to derive per-trial seeds.
std::uint64_t mix64(std::uint64_t x);

/// Combines a base seed with two identity fields of a trial.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

} // namespace eegcs
