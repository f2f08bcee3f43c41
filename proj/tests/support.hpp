#pragma once

#include "blc/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace blc::testing {

/// Random real field: Gaussian coefficients on every stored mode (optionally
/// only inside the dealiased box), with the k = 0 and self-conjugate modes
/// made real.
inline SpectralField random_field(const Grid& g, int rank, std::uint64_t seed, bool dealiased = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    PhysicalField p(g, rank);
    for (double& v : p.data()) v = nd(rng);
    SpectralField f = to_spectral(p);
    return dealiased ? dealias(f) : f;
}

/// sqrt(mean of squared samples), summed over components.
inline double l2(const SpectralField& f) {
    const auto& t = frequencies(f.grid());
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        const auto d = f.component(c);
        for (std::size_t i = 0; i < d.size(); ++i) s += t.weight[i] * std::norm(d[i]);
    }
    return std::sqrt(s);
}

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
    const double n = std::max(l2(a), l2(b));
    return n == 0.0 ? 0.0 : l2(a - b) / n;
}

inline double max_diff(const SpectralField& a, const SpectralField& b) { return (a - b).max_abs(); }

template <typename F>
PhysicalField sample(const Grid& g, int rank, F&& f) {
    PhysicalField p(g, rank);
    for (std::size_t m = 0; m < g.physical_size(); ++m) {
        const auto x = p.position(m);
        for (int c = 0; c < p.components(); ++c) p.component(c)[m] = f(c, x);
    }
    return p;
}

}  // namespace blc::testing
