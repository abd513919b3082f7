#pragma once

#include <cmath>
#include <cstdint>

namespace hrg {

// SplitMix64 (Steele--Lea--Flood). One 64-bit word of state advanced by the
// golden gamma; cheap, splittable, and fully deterministic, which is what the
// replicate-parallel Monte Carlo layer needs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1); never returns an endpoint, so it is
    // safe inside log() and inverse CDFs.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_uniform(double a, double b) { return a + (b - a) * next_uniform(); }

private:
    std::uint64_t state_;
};

// Stream seed for replicate k under a master seed. Replicates are mixed
// independently of execution order, so parallel runs reproduce serial ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
    Rng r(master ^ ((k + 1) * 0xA0761D6478BD642Full));
    r.next_u64();
    return r.next_u64();
}

namespace detail {

// ln(k!) -- exact table for small k, Stirling series beyond. Avoids the
// signgam thread-safety wart of lgamma().
inline double log_factorial(double k) {
    static const double table[] = {
        0.0, 0.0, 0.6931471805599453, 1.791759469228055, 3.1780538303479458,
        4.787491742782046, 6.579251212010101, 8.525161361065415,
        10.60460290274525, 12.801827480081469};
    if (k < 10.0) return table[static_cast<int>(k)];
    const double ik = 1.0 / k;
    return (k + 0.5) * std::log(k) - k + 0.9189385332046727
         + ik * (1.0 / 12.0 - ik * ik / 360.0);
}

}  // namespace detail

// Poisson(mean) sample. Chop-down inversion for small means, transformed
// rejection (Hormann's PTRS) for large ones.
inline std::uint64_t poisson(Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) {
        const double L = std::exp(-mean);
        std::uint64_t k = 0;
        double p = rng.next_uniform();
        while (p > L) {
            ++k;
            p *= rng.next_uniform();
        }
        return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.next_uniform() - 0.5;
        double v = rng.next_uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b)
            <= k * loglam - mean - detail::log_factorial(k)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

}  // namespace hrg
