#pragma once

// Data-parallel inner loops. Every kernel comes in two flavours:
//   kernels::serial  plain loops, the reference the tests compare against
//   kernels::omp     OpenMP version used by the library
// Reductions in the OpenMP flavour sum fixed-size chunks and then combine the
// partials in chunk order, so results do not depend on the thread count.

#include "blc/grid.hpp"

#include <cstddef>
#include <span>

namespace blc::kernels {

inline constexpr std::size_t reduction_chunk = 4096;

namespace serial {

/// out[i] = mult[i] * in[i]
void scale_modes(std::span<const cplx> in, std::span<const double> mult, std::span<cplx> out);
/// out[i] += s * mult[i] * in[i]
void scale_modes_add(std::span<const cplx> in, std::span<const double> mult, double s,
                     std::span<cplx> out);
/// out[i] += s * i * mult[i] * in[i]   (odd real multiplier times i)
void imag_scale_modes_add(std::span<const cplx> in, std::span<const double> mult, double s,
                          std::span<cplx> out);
/// out[i] += s * a[i] * b[i]
void multiply_add(std::span<const double> a, std::span<const double> b, double s,
                  std::span<double> out);
/// Σ weight[i] * |mask[i] * c[i]|^2
double weighted_norm2(std::span<const cplx> c, std::span<const double> weight,
                      std::span<const double> mask);
/// Σ |x[i]|^p
double power_sum(std::span<const double> x, double p);
double max_abs(std::span<const double> x);
/// out[i] = (Σ_c comps[c][i]^2)^{1/2} over `ncomp` comps stored back to back.
void pointwise_norm(std::span<const double> comps, int ncomp, std::span<double> out);

}  // namespace serial

namespace omp {

void scale_modes(std::span<const cplx> in, std::span<const double> mult, std::span<cplx> out);
void scale_modes_add(std::span<const cplx> in, std::span<const double> mult, double s,
                     std::span<cplx> out);
void imag_scale_modes_add(std::span<const cplx> in, std::span<const double> mult, double s,
                          std::span<cplx> out);
void multiply_add(std::span<const double> a, std::span<const double> b, double s,
                  std::span<double> out);
double weighted_norm2(std::span<const cplx> c, std::span<const double> weight,
                      std::span<const double> mask);
double power_sum(std::span<const double> x, double p);
double max_abs(std::span<const double> x);
void pointwise_norm(std::span<const double> comps, int ncomp, std::span<double> out);

}  // namespace omp

using omp::imag_scale_modes_add;
using omp::max_abs;
using omp::multiply_add;
using omp::pointwise_norm;
using omp::power_sum;
using omp::scale_modes;
using omp::scale_modes_add;
using omp::weighted_norm2;

/// Number of OpenMP threads the kernels use; 1 when built without OpenMP.
int thread_count();
/// Caps the thread count at $BLC_THREADS when that variable is set.
void configure_threads_from_env();

}  // namespace blc::kernels
