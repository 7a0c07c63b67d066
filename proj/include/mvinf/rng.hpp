#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mvinf {

// splitmix64 finalizer; used to decorrelate derived stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for sub-stream `stream` of a master seed. Stable across platforms.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Deterministic RNG wrapper. mt19937_64 is bit-exact per the standard and the
/// distribution transforms below are hand-rolled, so sequences are identical
/// across compilers and platforms (std::*_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1) with 53 bits of precision.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one cached value.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Geometric on {1, 2, ...} (number of trials until first success), by
    /// inversion: 1 + floor(log(1-u) / log(1-p)).
    long geometric(double p) {
        if (p >= 1.0) return 1;
        double u = uniform();
        return 1 + static_cast<long>(std::floor(std::log1p(-u) / std::log1p(-p)));
    }

    /// Poisson by inversion (small mean) or PTRS-free chunked inversion. Test
    /// and simulation use only; means here stay modest.
    long poisson(double mean) {
        long k = 0;
        double t = std::exp(-mean);
        // split large means to keep exp(-mean) away from underflow
        double remaining = mean;
        while (remaining > 500.0) {
            k += poisson(500.0);
            remaining -= 500.0;
        }
        if (remaining != mean) t = std::exp(-remaining);
        double prod = uniform();
        while (prod > t) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    /// Gamma(shape, scale) via Marsaglia-Tsang; shape < 1 boosted.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace mvinf
