#pragma once

#include "blc/field.hpp"

namespace blc {

// Forward transform divides by M^N so coefficients are Fourier-series
// amplitudes: f(x) = Σ_k c_k e^{i ξ_k·x}. With this scaling the discrete L²
// norm sqrt(mean f²) equals sqrt(Σ_k |c_k|²).
PhysicalField to_physical(const SpectralField& f);
SpectralField to_spectral(const PhysicalField& f);

/// Rank r -> rank r+1; the new index is the last one (∂_j f_i at entry (i, j)).
SpectralField gradient(const SpectralField& f);
/// Contracts the last index: rank r -> rank r-1.
SpectralField divergence(const SpectralField& v);
SpectralField laplacian(const SpectralField& f);
/// Δ⁻¹ on zero-mean input; the k = 0 output is 0.
SpectralField inverse_laplacian(const SpectralField& f);

/// P = I − ∇Δ⁻¹div, mode-wise I − ξξᵀ/|ξ|², k = 0 mapped to 0.
SpectralField leray_project(const SpectralField& v);

/// Zeroes every coefficient with some |k_i| > M/3.
SpectralField dealias(const SpectralField& f);

/// Mode-wise multiplication of every component by a real multiplier.
SpectralField apply_multiplier(const SpectralField& f, std::span<const double> mult);

/// Dealiased product of two scalar fields given in physical space.
SpectralField dealiased_product(const PhysicalField& a, const PhysicalField& b);

/// u ⊗ u for a vector field (rank 2, entry (i,j) = u_i u_j), dealiased.
SpectralField outer_square(const SpectralField& u);
/// ∇τ ⊙ ∇τ: entry (i,j) = Σ_k ∂_i τ_k ∂_j τ_k, dealiased.
SpectralField gradient_gram(const SpectralField& tau);

/// Pressure that balances the momentum equation, from
/// −Δp = div div(u⊗u + ∇τ⊙∇τ). Zero mean.
SpectralField recover_pressure(const SpectralField& u, const SpectralField& tau);

/// Constant field with all coefficients zero except k = 0.
SpectralField constant_field(const Grid& grid, int rank, std::span<const double> values);

/// Vector field assembled from scalar components (N of them).
SpectralField stack_components(std::span<const SpectralField> scalars);
/// Scalar field holding component c of f.
SpectralField extract_component(const SpectralField& f, int c);

/// Sets the k = 0 coefficient of every component to zero.
void remove_mean(SpectralField& f);

}  // namespace blc
