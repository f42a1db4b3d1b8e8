#pragma once

#include "skdv/rng.hpp"
#include "skdv/spectral.hpp"

#include <cmath>
#include <cstdint>

namespace skdv::testing {

// Real field with Gaussian coefficients of standard deviation <n>^decay.
inline SpectralField random_field(int n_max, std::uint64_t seed, double decay = 0, bool mean_zero = false) {
    CounterRng rng(seed, Stream::Auxiliary, 17);
    VectorXc half(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double sd = std::pow(1.0 + n, decay);
        const double re = rng.normal(), im = rng.normal();
        half(n) = sd * Complex(re, n == 0 ? 0.0 : im);
    }
    return SpectralField(TorusGrid(n_max), half, mean_zero);
}

// Complex space-time samples with independent Gaussian entries.
inline SpaceTimeField random_space_time(int n_max, int samples, std::uint64_t seed, double t0 = 0, double dt = 0.05) {
    CounterRng rng(seed, Stream::Auxiliary, 23);
    SpaceTimeField u(TorusGrid(n_max), t0, dt, samples);
    for (int k = 0; k < samples; ++k)
        for (int n = -n_max; n <= n_max; ++n) {
            const double re = rng.normal(), im = rng.normal();
            u(n, k) = Complex(re, im);
        }
    return u;
}

// Real-valued (Hermitian rows) space-time samples with coefficient decay <n>^decay.
inline SpaceTimeField random_real_space_time(int n_max, int samples, std::uint64_t seed, double t0 = 0, double dt = 0.05,
                                             double decay = 0, bool mean_zero = true) {
    CounterRng rng(seed, Stream::Auxiliary, 29);
    SpaceTimeField u(TorusGrid(n_max), t0, dt, samples);
    for (int k = 0; k < samples; ++k)
        for (int n = 0; n <= n_max; ++n) {
            const double sd = std::pow(1.0 + n, decay);
            const double re = rng.normal(), im = rng.normal();
            Complex z = sd * Complex(re, im);
            if (n == 0) z = mean_zero ? Complex(0) : Complex(z.real(), 0);
            u(n, k) = z;
            u(-n, k) = std::conj(z);
        }
    return u;
}

inline double relative_error(const VectorXc& a, const VectorXc& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace skdv::testing
