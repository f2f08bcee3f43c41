#include "blc/littlewood_paley.hpp"

#include "blc/errors.hpp"
#include "blc/kernels.hpp"
#include "blc/spectral.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace blc {

namespace {

constexpr double inner_radius = 3.0 / 4.0;
constexpr double outer_radius = 4.0 / 3.0;

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double chi_profile(double r) {
    const double t = (r - inner_radius) / (outer_radius - inner_radius);
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double a = bump(1.0 - t);
    return a / (bump(t) + a);
}

double phi_profile(double r) { return chi_profile(0.5 * r) - chi_profile(r); }

DyadicPartition::DyadicPartition(const Grid& grid) : grid_(grid) {
    const auto& t = frequencies(grid);
    const std::size_t n = grid.spectral_size();
    auto phi_at = [&](std::size_t i, int q) {
        const double r = t.xi_norm[i];
        return chi_profile(std::ldexp(r, -(q + 1))) - chi_profile(std::ldexp(r, -q));
    };

    // The fundamental frequency k0 is the smallest nonzero |ξ|; the first
    // annulus reaching it has (8/3)2^q > k0.
    int q = static_cast<int>(std::floor(std::log2(3.0 * grid.k0() / 8.0))) - 2;
    for (;; ++q) {
        bool hit = false;
        for (std::size_t i = 1; i < n && !hit; ++i) hit = phi_at(i, q) > 0.0;
        if (hit) break;
    }
    q_min_ = q;

    const double dealias_radius = grid.points() / 3.0 * grid.k0();
    q_max_ = q_min_ - 1;
    while (std::ldexp(inner_radius, q_max_ + 1) <= dealias_radius) ++q_max_;
    if (block_count() < 2)
        throw PreconditionError("build_partition: grid too coarse, fewer than 2 resolvable blocks");

    masks_.resize(static_cast<std::size_t>(block_count()));
    for (int b = q_min_; b <= q_max_; ++b) {
        auto& m = masks_[static_cast<std::size_t>(b - q_min_)];
        m.resize(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = phi_at(i, b);
    }
    low_residual_ = low_mask(q_min_);
    high_residual_ = low_mask(q_max_ + 1);
    for (double& v : high_residual_) v = 1.0 - v;
}

std::span<const double> DyadicPartition::block_mask(int q) const {
    if (!contains(q))
        throw PreconditionError("block index " + std::to_string(q) + " outside [" +
                                std::to_string(q_min_) + ", " + std::to_string(q_max_) + "]");
    return masks_[static_cast<std::size_t>(q - q_min_)];
}

std::vector<double> DyadicPartition::low_mask(int q) const {
    const auto& t = frequencies(grid_);
    std::vector<double> m(t.xi_norm.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = chi_profile(std::ldexp(t.xi_norm[i], -q));
    return m;
}

void DyadicPartition::dump_csv(std::ostream& out, int samples) const {
    out << "q,xi,phi\n";
    const double r_max = std::ldexp(8.0 / 3.0, q_max_) * grid_.k0();
    out.precision(17);
    for (int q = q_min_; q <= q_max_; ++q)
        for (int s = 0; s < samples; ++s) {
            const double r = r_max * s / (samples - 1);
            out << q << ',' << r << ',' << phi_profile(std::ldexp(r, -q)) << '\n';
        }
}

DyadicPartition build_partition(const Grid& grid) { return DyadicPartition(grid); }

namespace {

void check_grid(const SpectralField& u, const DyadicPartition& P, const char* where) {
    if (!(u.grid() == P.grid())) throw ShapeError(std::string(where) + ": partition built for another grid");
}

}  // namespace

SpectralField block_project(const SpectralField& u, int q, const DyadicPartition& P) {
    check_grid(u, P, "block_project");
    return apply_multiplier(u, P.block_mask(q));
}

SpectralField low_pass(const SpectralField& u, int q, const DyadicPartition& P) {
    check_grid(u, P, "low_pass");
    if (q < P.q_min() || q > P.q_max() + 1)
        throw PreconditionError("low_pass: q = " + std::to_string(q) + " outside [q_min, q_max+1]");
    return apply_multiplier(u, P.low_mask(q));
}

BlockDecomposition decompose(const SpectralField& u, const DyadicPartition& P) {
    check_grid(u, P, "decompose");
    BlockDecomposition d{P.q_min(), {}, apply_multiplier(u, P.residual_low_mask()),
                         apply_multiplier(u, P.residual_high_mask())};
    d.blocks.reserve(static_cast<std::size_t>(P.block_count()));
    for (int q = P.q_min(); q <= P.q_max(); ++q) d.blocks.push_back(apply_multiplier(u, P.block_mask(q)));
    return d;
}

SpectralField reconstruct(const BlockDecomposition& d) {
    SpectralField u = d.residual_low;
    for (const auto& b : d.blocks) u += b;
    u += d.residual_high;
    return u;
}

}  // namespace blc
