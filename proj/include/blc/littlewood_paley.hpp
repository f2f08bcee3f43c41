#pragma once

#include "blc/field.hpp"

#include <iosfwd>
#include <vector>

namespace blc {

/// Radial cut-off: 1 on |ξ| <= 3/4, 0 for |ξ| >= 4/3, C^∞ in between via
/// ψ(t) = g(1-t) / (g(t) + g(1-t)), g(t) = exp(-1/t) for t > 0.
double chi_profile(double r);
/// φ(r) = χ(r/2) − χ(r); supported in 3/4 <= r <= 8/3.
double phi_profile(double r);

/// Dyadic partition of unity sampled on a grid.
///
/// Blocks q_min..q_max are the ones the grid resolves: q_min is the first
/// annulus holding a nonzero grid frequency, q_max the last whose inner
/// radius (3/4)2^q fits under the dealiasing radius (M/3)·k0. Content below
/// q_min (only the mean, for this choice of q_min) and above q_max is kept in
/// two residuals so decompositions are exact.
class DyadicPartition {
public:
    explicit DyadicPartition(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    int q_min() const noexcept { return q_min_; }
    int q_max() const noexcept { return q_max_; }
    int block_count() const noexcept { return q_max_ - q_min_ + 1; }
    bool contains(int q) const noexcept { return q >= q_min_ && q <= q_max_; }

    /// φ_q(ξ) at every stored mode. Throws PreconditionError outside q_range.
    std::span<const double> block_mask(int q) const;
    /// χ(ξ/2^q) at every stored mode, for any integer q.
    std::vector<double> low_mask(int q) const;
    /// χ(ξ/2^{q_min}): multiplier of the low residual.
    std::span<const double> residual_low_mask() const { return low_residual_; }
    /// 1 − χ(ξ/2^{q_max+1}): multiplier of the high residual.
    std::span<const double> residual_high_mask() const { return high_residual_; }

    /// CSV rows (q, |ξ|, φ_q(|ξ|)) for `samples` radii spread evenly over
    /// [0, (8/3)2^{q_max}], for every resolvable q.
    void dump_csv(std::ostream& out, int samples = 1024) const;

private:
    Grid grid_;
    int q_min_ = 0;
    int q_max_ = 0;
    std::vector<std::vector<double>> masks_;
    std::vector<double> low_residual_;
    std::vector<double> high_residual_;
};

DyadicPartition build_partition(const Grid& grid);

/// Δ_q u
SpectralField block_project(const SpectralField& u, int q, const DyadicPartition& P);
/// S_q u = residual_low + Σ_{p<=q-1} Δ_p u, multiplier χ(ξ/2^q); q in [q_min, q_max+1].
SpectralField low_pass(const SpectralField& u, int q, const DyadicPartition& P);

struct BlockDecomposition {
    int q_min = 0;
    std::vector<SpectralField> blocks;  // blocks[i] = Δ_{q_min+i} u
    SpectralField residual_low;         // S_{q_min} u
    SpectralField residual_high;        // u − S_{q_max+1} u

    const SpectralField& block(int q) const { return blocks.at(static_cast<std::size_t>(q - q_min)); }
    int q_max() const { return q_min + static_cast<int>(blocks.size()) - 1; }
};

BlockDecomposition decompose(const SpectralField& u, const DyadicPartition& P);
SpectralField reconstruct(const BlockDecomposition& d);

}  // namespace blc
