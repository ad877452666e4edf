#include "flexent/rng.hpp"

#include "flexent/errors.hpp"

namespace flexent {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) throw ValidationError("uniform_index: n must be positive");
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw ValidationError("poisson: mean must be finite and nonnegative");
    if (mean == 0.0) return 0;

    if (mean < 10.0) {
        // inversion by sequential search: one uniform per variate
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    // Hormann (1993) PTRS: transformed rejection with squeeze.
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (kf < 0.0) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (us < 0.013 && v > us) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_mean - mean - std::lgamma(kf + 1.0)) {
            return static_cast<std::uint64_t>(kf);
        }
    }
}

std::uint64_t Rng::mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::derive_seed(std::uint64_t master_seed, std::uint64_t stream_id,
                               std::uint64_t k) {
    std::uint64_t s = mix(master_seed);
    s = mix(s ^ (0x9e3779b97f4a7c15ULL + stream_id));
    s = mix(s ^ (0xbf58476d1ce4e5b9ULL + k));
    return s;
}

Rng Rng::for_stream(std::uint64_t master_seed, std::uint64_t stream_id,
                    std::uint64_t k) {
    return Rng(derive_seed(master_seed, stream_id, k));
}

} // namespace flexent
