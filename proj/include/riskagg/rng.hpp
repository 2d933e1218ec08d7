#pragma once

// Deterministic random stream. All variate algorithms are hand-rolled on top
// of mt19937_64 so that a fixed seed yields bit-identical output on every
// platform (std::gamma_distribution and friends are implementation-defined).
// One stream per worker; streams are never shared between threads.

#include <cmath>
#include <cstdint>
#include <random>

#include "riskagg/common.hpp"

namespace riskagg {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    // Box-Muller, uncached.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Ga(shape) with unit scale. Marsaglia-Tsang squeeze rejection for
    // shape >= 1; shape < 1 via Ga(shape+1) * U^{1/shape}.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw domain_error("Rng::gamma: shape must be positive");
        if (shape < 1.0)
            return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace riskagg
