#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flexent {

// Deterministic random source. std::mt19937_64 has a standard-specified
// output sequence, and all variate transforms below are hand-rolled, so a
// seed pins every downstream draw bit-for-bit across platforms and library
// versions (std::*_distribution makes no such guarantee).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal (Box-Muller, second variate cached).
    double normal();

    // Poisson draw: sequential-search inversion for small means, Hormann's
    // PTRS transformed rejection for large ones.
    std::uint64_t poisson(double mean);

    // Child stream independent of the parent and of other (stream_id, k)
    // combinations; used to give each purpose/channel its own sequence.
    static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream_id,
                          std::uint64_t k = 0);

    // The seed for_stream would use, for callers that need to hand a seed
    // to a component rather than an Rng.
    static std::uint64_t derive_seed(std::uint64_t master_seed,
                                     std::uint64_t stream_id, std::uint64_t k = 0);

private:
    static std::uint64_t mix(std::uint64_t z);

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream ids for the pipeline; keeping them in one place avoids collisions.
namespace stream {
inline constexpr std::uint64_t kRotationA = 1;
inline constexpr std::uint64_t kRotationB = 2;
inline constexpr std::uint64_t kTomoCounts = 3;
inline constexpr std::uint64_t kJsi = 4;
inline constexpr std::uint64_t kChain = 5;
} // namespace stream

} // namespace flexent
