#pragma once

#include "blc/besov.hpp"

#include <cstdint>

namespace blc {

// Bony calculus for scalar fields. Every product is formed in physical space
// and dealiased, so for dealiased inputs each term is the exact truncated
// product.
//
// The torus has content the homogeneous calculus does not see: the mean
// (residual_low) and modes above the last resolvable block (residual_high).
// T_u v includes the mean of u through S_{q-1}u; what remains is reported in
// low_terms (mean × mean) and high_terms (anything touching residual_high).

/// T_u v = Σ_q S_{q-1}u Δ_q v
SpectralField paraproduct_T(const SpectralField& u, const SpectralField& v, const DyadicPartition& P);
/// R(u, v) = Σ_{|p-q|<=1} Δ_p u Δ_q v
SpectralField remainder_R(const SpectralField& u, const SpectralField& v, const DyadicPartition& P);
/// Single summand S_{q-1}u Δ_q v of T_u v.
SpectralField paraproduct_summand(const SpectralField& u, const SpectralField& v, int q,
                                  const DyadicPartition& P);

struct BonySplit {
    SpectralField t_uv;
    SpectralField t_vu;
    SpectralField remainder;
    SpectralField low_terms;
    SpectralField high_terms;

    SpectralField sum() const;
};

/// Splits uv and checks t_uv + t_vu + remainder + low + high = dealias(uv);
/// throws ConsistencyError if the relative mismatch exceeds `tolerance`.
BonySplit bony_reconstruct(const SpectralField& u, const SpectralField& v, const DyadicPartition& P,
                           double tolerance = 1e-12);

/// Norm slot of a continuity estimate: either L^∞ or a Besov norm.
struct NormSpec {
    enum class Kind { linf, besov } kind = Kind::besov;
    BesovIndex besov;

    static NormSpec linf() { return {Kind::linf, {}}; }
    static NormSpec of(double s, double p, double r) { return {Kind::besov, {s, p, r}}; }
};

enum class ProbeOperator { T, R };

struct ProbeSpec {
    ProbeOperator op = ProbeOperator::T;
    NormSpec source_u;
    NormSpec source_v;
    NormSpec target;
};

struct SampleSet {
    int count = 100;
    int modes = 20;
    std::uint64_t seed = 1;
};

/// Checks the hypotheses of the paraproduct/remainder continuity estimates
/// for this index choice; throws PreconditionError when they fail.
void check_probe_indices(const ProbeSpec& spec, int dim);

/// Target index of the remainder probe, with 1/r = min(1, 1/r1 + 1/r2) and
/// σ = s1 + s2 − N(1/p1 + 1/p2 − 1/p).
BesovIndex remainder_target(const BesovIndex& a, const BesovIndex& b, double p, int dim);

/// Random trigonometric polynomial: `modes` unit-amplitude Fourier modes with
/// random phases at random nonzero wave vectors inside the dealiased box.
SpectralField random_trig_polynomial(const Grid& grid, int modes, std::uint64_t seed);

/// max over samples of ‖op(u,v)‖_target / (‖u‖_source_u ‖v‖_source_v);
/// samples with a zero denominator are skipped.
double continuity_probe(const ProbeSpec& spec, const SampleSet& samples, const DyadicPartition& P);

double evaluate_norm(const SpectralField& f, const NormSpec& spec, const DyadicPartition& P);

}  // namespace blc
