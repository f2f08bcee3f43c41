#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace blc {

using cplx = std::complex<double>;

/// Periodic box [0, period)^N sampled on M points per axis.
///
/// Physical samples are stored row-major with axis 0 slowest. Spectral
/// coefficients use the real-to-complex half layout: axes 0..N-2 carry all
/// M frequencies {0, 1, ..., M/2, -M/2+1, ..., -1}, the last axis carries
/// only 0..M/2. Coefficient (k) of a real field and its partner (-k) are
/// conjugate, so the half layout holds the full information.
class Grid {
public:
    Grid(int dim, int points_per_axis, double period = 2.0 * std::numbers::pi);

    int dim() const noexcept { return dim_; }
    int points() const noexcept { return points_; }
    double period() const noexcept { return period_; }
    /// Fundamental wavenumber 2π/period.
    double k0() const noexcept { return 2.0 * std::numbers::pi / period_; }

    std::size_t physical_size() const noexcept { return physical_size_; }
    std::size_t spectral_size() const noexcept { return spectral_size_; }
    /// Length of the halved last spectral axis, M/2 + 1.
    int half_points() const noexcept { return points_ / 2 + 1; }

    /// Largest integer mode kept by the 2/3 rule, floor(M/3).
    int dealias_cutoff() const noexcept { return points_ / 3; }

    /// Signed integer wave vector of spectral index `idx`; unused axes are 0.
    std::array<int, 3> mode(std::size_t idx) const noexcept;
    /// Spectral index of an integer wave vector with k_last >= 0.
    std::size_t spectral_index(const std::array<int, 3>& k) const;

    bool operator==(const Grid& other) const noexcept {
        return dim_ == other.dim_ && points_ == other.points_ && period_ == other.period_;
    }

private:
    int dim_;
    int points_;
    double period_;
    std::size_t physical_size_;
    std::size_t spectral_size_;
};

/// Per-mode tables shared by every operator on a grid. Built once per grid and
/// cached for the lifetime of the process.
struct FrequencyTable {
    /// Integer wave vectors.
    std::vector<std::array<int, 3>> k;
    /// Physical frequency ξ = k0·k and its norm.
    std::vector<std::array<double, 3>> xi;
    std::vector<double> xi_norm;
    std::vector<double> xi_norm2;
    /// ξ with Nyquist entries zeroed; used for odd multipliers (∂, Leray) so
    /// derivatives of real fields stay real.
    std::vector<std::array<double, 3>> xi_odd;
    /// Multiplicity of each stored mode in the full spectrum (1 or 2).
    std::vector<double> weight;
    /// 1 if the mode survives the 2/3 rule, else 0.
    std::vector<double> dealias_mask;
};

const FrequencyTable& frequencies(const Grid& grid);

}  // namespace blc
