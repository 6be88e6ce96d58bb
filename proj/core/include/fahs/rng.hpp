#pragma once

// Reproducible random number generation. All stochastic code in the library
// draws from Pcg32 streams; a (seed, stream) pair fully determines the
// sequence, so per-coordinate substreams stay reproducible no matter how work
// is split across threads. Child seeds for replication grids are derived with
// splitmix64 so alternate implementations can replicate the streams.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace fahs {

// PCG-XSH-RR 64/32 (O'Neill). `stream` selects one of 2^63 independent
// sequences for the same seed.
class Pcg32 {
public:
    Pcg32() : Pcg32(0, 0) {}
    Pcg32(std::uint64_t seed, std::uint64_t stream) {
        inc_ = (stream << 1u) | 1u;
        state_ = 0;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    // Uniform on the open interval (0,1).
    double next_double() {
        constexpr double inv = 1.0 / 4294967296.0;
        return (static_cast<double>(next_u32()) + 0.5) * inv;
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic child seed for (setting, replication) grid cells:
// two chained splitmix64 rounds keyed by the 1-based indices.
inline std::uint64_t child_seed(std::uint64_t base_seed, std::uint64_t setting_index,
                                std::uint64_t replication_index) {
    std::uint64_t x = splitmix64(base_seed ^ (0x9E3779B97F4A7C15ULL * (setting_index + 1)));
    return splitmix64(x ^ (0xC2B2AE3D27D4EB4FULL * (replication_index + 1)));
}

// FNV-1a tag hash; used to derive per-procedure seeds from readable names.
inline std::uint64_t tag_hash(std::string_view tag) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    return splitmix64(seed ^ tag_hash(tag));
}

// Standard normal via Marsaglia's polar method (rejection, no trig).
inline double normal_draw(Pcg32& rng) {
    for (;;) {
        const double u = 2.0 * rng.next_double() - 1.0;
        const double v = 2.0 * rng.next_double() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

// Exponential with unit rate.
inline double exponential_draw(Pcg32& rng) { return -std::log(rng.next_double()); }

// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 handled by boosting.
inline double gamma_draw(Pcg32& rng, double shape) {
    if (shape < 1.0) {
        const double u = rng.next_double();
        return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal_draw(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_double();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// Inverse-gamma with given shape and scale: X = scale / Gamma(shape, 1).
inline double inverse_gamma_draw(Pcg32& rng, double shape, double scale) {
    if (shape == 1.0) {
        return scale / exponential_draw(rng);
    }
    return scale / gamma_draw(rng, shape);
}

// Standard half-Cauchy: tan of a uniform quarter-turn.
inline double half_cauchy_draw(Pcg32& rng) {
    return std::tan(0.5 * M_PI * rng.next_double());
}

}  // namespace fahs
