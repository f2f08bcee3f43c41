#include "blc/paraproduct.hpp"

#include "blc/errors.hpp"
#include "blc/kernels.hpp"
#include "blc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace blc {

namespace {

// Physical-space pieces u = low + Σ_q blocks[q] + high.
struct PhysicalPieces {
    PhysicalField low;
    std::vector<PhysicalField> blocks;
    PhysicalField high;
    PhysicalField full;
};

void check_scalar_pair(const SpectralField& u, const SpectralField& v, const DyadicPartition& P,
                       const char* where) {
    require_same_shape(u.grid(), u.rank(), v.grid(), v.rank(), where);
    if (u.rank() != 0) throw ShapeError(std::string(where) + ": scalar fields expected");
    if (!(u.grid() == P.grid())) throw ShapeError(std::string(where) + ": partition built for another grid");
}

PhysicalPieces pieces(const SpectralField& u, const DyadicPartition& P) {
    PhysicalPieces out{to_physical(apply_multiplier(u, P.residual_low_mask())), {},
                       to_physical(apply_multiplier(u, P.residual_high_mask())), to_physical(u)};
    out.blocks.reserve(static_cast<std::size_t>(P.block_count()));
    for (int q = P.q_min(); q <= P.q_max(); ++q) out.blocks.push_back(to_physical(apply_multiplier(u, P.block_mask(q))));
    return out;
}

const PhysicalField& block_of(const PhysicalPieces& p, int q, const DyadicPartition& P) {
    return p.blocks[static_cast<std::size_t>(q - P.q_min())];
}

PhysicalField paraproduct_physical(const PhysicalPieces& u, const PhysicalPieces& v,
                                   const DyadicPartition& P) {
    PhysicalField acc(P.grid(), 0);
    PhysicalField low = u.low;  // S_{q-1}u, starting at q = q_min
    for (int q = P.q_min(); q <= P.q_max(); ++q) {
        kernels::multiply_add(low.data(), block_of(v, q, P).data(), 1.0, acc.data());
        if (q - 1 >= P.q_min()) {
            auto src = block_of(u, q - 1, P).data();
            auto dst = low.data();
            std::transform(dst.begin(), dst.end(), src.begin(), dst.begin(), std::plus<>());
        }
    }
    return acc;
}

PhysicalField remainder_physical(const PhysicalPieces& u, const PhysicalPieces& v,
                                 const DyadicPartition& P) {
    PhysicalField acc(P.grid(), 0);
    for (int p = P.q_min(); p <= P.q_max(); ++p)
        for (int q = std::max(P.q_min(), p - 1); q <= std::min(P.q_max(), p + 1); ++q)
            kernels::multiply_add(block_of(u, p, P).data(), block_of(v, q, P).data(), 1.0, acc.data());
    return acc;
}

SpectralField finish(const PhysicalField& f) { return dealias(to_spectral(f)); }

double coefficient_norm(const SpectralField& f) {
    const auto& t = frequencies(f.grid());
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c) s += kernels::weighted_norm2(f.component(c), t.weight, {});
    return std::sqrt(s);
}

}  // namespace

SpectralField paraproduct_T(const SpectralField& u, const SpectralField& v, const DyadicPartition& P) {
    check_scalar_pair(u, v, P, "paraproduct_T");
    return finish(paraproduct_physical(pieces(u, P), pieces(v, P), P));
}

SpectralField remainder_R(const SpectralField& u, const SpectralField& v, const DyadicPartition& P) {
    check_scalar_pair(u, v, P, "remainder_R");
    return finish(remainder_physical(pieces(u, P), pieces(v, P), P));
}

SpectralField paraproduct_summand(const SpectralField& u, const SpectralField& v, int q,
                                  const DyadicPartition& P) {
    check_scalar_pair(u, v, P, "paraproduct_summand");
    SpectralField low = apply_multiplier(u, P.residual_low_mask());
    for (int p = P.q_min(); p <= q - 2; ++p) low += block_project(u, p, P);
    return dealiased_product(to_physical(low), to_physical(block_project(v, q, P)));
}

SpectralField BonySplit::sum() const {
    SpectralField s = t_uv;
    s += t_vu;
    s += remainder;
    s += low_terms;
    s += high_terms;
    return s;
}

BonySplit bony_reconstruct(const SpectralField& u, const SpectralField& v, const DyadicPartition& P,
                           double tolerance) {
    check_scalar_pair(u, v, P, "bony_reconstruct");
    const PhysicalPieces pu = pieces(u, P);
    const PhysicalPieces pv = pieces(v, P);

    PhysicalField low(P.grid(), 0);
    kernels::multiply_add(pu.low.data(), pv.low.data(), 1.0, low.data());
    PhysicalField high(P.grid(), 0);
    kernels::multiply_add(pu.high.data(), pv.full.data(), 1.0, high.data());
    kernels::multiply_add(pu.full.data(), pv.high.data(), 1.0, high.data());
    kernels::multiply_add(pu.high.data(), pv.high.data(), -1.0, high.data());

    BonySplit split{finish(paraproduct_physical(pu, pv, P)), finish(paraproduct_physical(pv, pu, P)),
                    finish(remainder_physical(pu, pv, P)), finish(low), finish(high)};

    const SpectralField product = dealiased_product(pu.full, pv.full);
    const double scale = coefficient_norm(product);
    const double err = coefficient_norm(split.sum() - product);
    if (err > tolerance * (scale > 0.0 ? scale : 1.0))
        throw ConsistencyError("Bony reconstruction failed: relative error " + std::to_string(err / scale));
    return split;
}

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)); }
double inv(double e) { return std::isinf(e) ? 0.0 : 1.0 / e; }

void require(bool ok, const std::string& what) {
    if (!ok) throw PreconditionError("continuity probe: " + what);
}

}  // namespace

BesovIndex remainder_target(const BesovIndex& a, const BesovIndex& b, double p, int dim) {
    const double sigma = a.s + b.s - dim * (inv(a.p) + inv(b.p) - inv(p));
    const double inv_r = std::min(1.0, inv(a.r) + inv(b.r));
    return {sigma, p, inv_r == 0.0 ? inf : 1.0 / inv_r};
}

void check_probe_indices(const ProbeSpec& spec, int dim) {
    const auto& target = spec.target;
    require(target.kind == NormSpec::Kind::besov, "target must be a Besov norm");
    validate(target.besov);
    const double N = dim;
    const auto critical_ok = [&](double s, double p, double r) {
        const double crit = N * inv(p);
        return s < crit - 1e-12 || (near(s, crit) && r == 1.0);
    };
    if (spec.op == ProbeOperator::T) {
        require(spec.source_v.kind == NormSpec::Kind::besov, "second source must be Besov");
        const auto& v = spec.source_v.besov;
        validate(v);
        if (spec.source_u.kind == NormSpec::Kind::linf) {
            require(near(target.besov.s, v.s) && target.besov.p == v.p && target.besov.r == v.r,
                    "L^inf x B^s_{p,r} maps into B^s_{p,r}");
            require(critical_ok(v.s, v.p, v.r), "need s < N/p, or s = N/p with r = 1");
        } else {
            const auto& u = spec.source_u.besov;
            validate(u);
            const double sigma = -u.s;
            require(sigma > 0.0, "first source must have negative regularity -sigma");
            require(std::isinf(u.p), "first source must be B^{-sigma}_{inf, r1}");
            require(inv(u.r) + inv(v.r) <= 1.0 + 1e-12, "need 1/r1 + 1/r2 <= 1");
            require(near(inv(target.besov.r), inv(u.r) + inv(v.r)), "need 1/r = 1/r1 + 1/r2");
            require(target.besov.p == v.p && near(target.besov.s, v.s - sigma), "target must be B^{s-sigma}_{p,r}");
            require(critical_ok(target.besov.s, v.p, target.besov.r), "need s - sigma < N/p, or equality with r = 1");
        }
    } else {
        require(spec.source_u.kind == NormSpec::Kind::besov && spec.source_v.kind == NormSpec::Kind::besov,
                "remainder sources must be Besov norms");
        const auto& a = spec.source_u.besov;
        const auto& b = spec.source_v.besov;
        validate(a);
        validate(b);
        const double ip = inv(a.p) + inv(b.p);
        const double ir = inv(a.r) + inv(b.r);
        require(a.s + b.s > 0.0, "need s1 + s2 > 0");
        require(inv(target.besov.p) <= ip + 1e-12 && ip <= 1.0 + 1e-12, "need 1/p <= 1/p1 + 1/p2 <= 1");
        require(inv(target.besov.r) <= ir + 1e-12 && ir <= 1.0 + 1e-12, "need 1/r <= 1/r1 + 1/r2 <= 1");
        const double sigma = a.s + b.s - N * (ip - inv(target.besov.p));
        require(near(target.besov.s, sigma), "target regularity must be s1 + s2 - N(1/p1 + 1/p2 - 1/p)");
        require(critical_ok(sigma, target.besov.p, target.besov.r), "need sigma < N/p, or equality with r = 1");
    }
}

SpectralField random_trig_polynomial(const Grid& grid, int modes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int cut = grid.dealias_cutoff();
    std::uniform_int_distribution<int> pick(-cut, cut);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    SpectralField f(grid, 0);
    const int last = grid.dim() - 1;
    for (int m = 0; m < modes;) {
        std::array<int, 3> k{0, 0, 0};
        bool zero = true;
        for (int a = 0; a < grid.dim(); ++a) {
            k[a] = pick(rng);
            zero = zero && k[a] == 0;
        }
        if (zero) continue;
        const cplx c = 0.5 * std::polar(1.0, phase(rng));
        // cos(k·x + θ) has coefficient c at k and conj(c) at -k
        std::array<int, 3> minus{-k[0], -k[1], -k[2]};
        const bool flipped = k[last] < 0;
        if (flipped) std::swap(k, minus);
        const cplx at_k = flipped ? std::conj(c) : c;
        f.set_coeff(0, k, f.coeff(0, k) + at_k);
        if (k[last] == 0) f.set_coeff(0, minus, f.coeff(0, minus) + std::conj(at_k));
        ++m;
    }
    return f;
}

double evaluate_norm(const SpectralField& f, const NormSpec& spec, const DyadicPartition& P) {
    if (spec.kind == NormSpec::Kind::linf) return lp_norm(to_physical(f), inf);
    return besov_norm(f, spec.besov, P);
}

double continuity_probe(const ProbeSpec& spec, const SampleSet& samples, const DyadicPartition& P) {
    check_probe_indices(spec, P.grid().dim());
    double worst = 0.0;
    for (int i = 0; i < samples.count; ++i) {
        const auto u = random_trig_polynomial(P.grid(), samples.modes, samples.seed + 2 * static_cast<std::uint64_t>(i));
        const auto v = random_trig_polynomial(P.grid(), samples.modes, samples.seed + 2 * static_cast<std::uint64_t>(i) + 1);
        const double denom = evaluate_norm(u, spec.source_u, P) * evaluate_norm(v, spec.source_v, P);
        if (!(denom > 0.0)) continue;
        const SpectralField out = spec.op == ProbeOperator::T ? paraproduct_T(u, v, P) : remainder_R(u, v, P);
        worst = std::max(worst, evaluate_norm(out, spec.target, P) / denom);
    }
    return worst;
}

}  // namespace blc
