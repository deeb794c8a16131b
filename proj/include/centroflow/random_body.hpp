#pragma once

// Seeded generation of random symmetric strictly convex bodies from
// even-wavenumber Fourier perturbations of the unit circle.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "centroflow/convex_body.hpp"

namespace centroflow {

struct RandomBodySpec {
    std::uint64_t seed = 0;
    unsigned k_max = 4;         // highest perturbation index (wavenumber 2*k_max)
    double amplitude = 0.12;    // base coefficient bound
    double decay = 0.5;         // per-harmonic amplitude decay
    double convexity_margin = 0.1;  // required min r
};

/// s(theta) = 1 + sum_k (a_k cos 2k theta + b_k sin 2k theta), rejection
/// resampled until min r >= margin.  Deterministic for a fixed seed.
inline SupportBody generate_random_body(const RandomBodySpec& spec, const AngularGrid& grid) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> a(spec.k_max), b(spec.k_max);
        double bound = spec.amplitude;
        for (unsigned k = 0; k < spec.k_max; ++k) {
            a[k] = bound * unit(rng);
            b[k] = bound * unit(rng);
            bound *= spec.decay;
        }
        std::vector<double> values(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid.node(i);
            double s = 1.0;
            for (unsigned k = 0; k < spec.k_max; ++k) {
                const double w = 2.0 * static_cast<double>(k + 1);
                s += a[k] * std::cos(w * t) + b[k] * std::sin(w * t);
            }
            values[i] = s;
        }
        PeriodicField field(grid, std::move(values), true);
        bool ok = field.min() > 0.0;
        if (ok) {
            const auto r = differentiate(field, 2) + field;
            ok = r.min() >= spec.convexity_margin;
        }
        if (ok) return SupportBody::from_symmetric(std::move(field));
    }
    throw NumericError("generate_random_body: 1000 rejections (amplitudes too large?)");
}

}  // namespace centroflow
