// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "blc/diagnostics.hpp"
#include "blc/errors.hpp"
#include "blc/kernels.hpp"
#include "blc/paraproduct.hpp"
#include "blc/spectral.hpp"

#include "../support.hpp"

#include <malloc.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace blc;
using blc::testing::l2;
using blc::testing::random_field;
using blc::testing::rel_diff;
using blc::testing::sample;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Σ_{q=a}^{b} φ_q = χ(·/2^{b+1}) − χ(·/2^a) on every grid frequency.
Verdict telescoping() {
    const auto t0 = std::chrono::steady_clock::now();
    const DyadicPartition P(Grid(2, 64));
    double worst = 0.0;
    for (int a = P.q_min(); a <= P.q_max(); ++a) {
        const auto lo = P.low_mask(a);
        std::vector<double> sum(lo.size(), 0.0);
        for (int b = a; b <= P.q_max(); ++b) {
            const auto m = P.block_mask(b);
            const auto hi = P.low_mask(b + 1);
            for (std::size_t i = 0; i < sum.size(); ++i) {
                sum[i] += m[i];
                worst = std::max(worst, std::abs(sum[i] - (hi[i] - lo[i])));
            }
        }
    }
    const double dt = seconds_since(t0);
    return {worst <= 1e-14 && dt < 1.0, fmt("max defect %.2e (tol 1e-14), %.3f s (limit 1 s)", worst, dt)};
}

// 2. reconstruct(decompose(u)) = u on 50 random fields.
Verdict reconstruction() {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int dim = i % 2 == 0 ? 2 : 3;
        const Grid g(dim, dim == 2 ? 64 : 16);
        const DyadicPartition P(g);
        const SpectralField u = random_field(g, i % 3 == 0 ? 1 : 0, 100 + i);
        worst = std::max(worst, l2(u - reconstruct(decompose(u, P))) / l2(u));
    }
    return {worst < 1e-13, fmt("max relative error %.2e over 50 fields (tol 1e-13)", worst)};
}

// 3. Bony identity on 50 random dealiased pairs.
Verdict bony() {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Grid g(2, i % 2 == 0 ? 64 : 32);
        const DyadicPartition P(g);
        const SpectralField u = random_field(g, 0, 200 + 2 * i, true);
        const SpectralField v = random_field(g, 0, 201 + 2 * i, true);
        const BonySplit s = bony_reconstruct(u, v, P, 1.0);
        const SpectralField product = dealiased_product(to_physical(u), to_physical(v));
        worst = std::max(worst, l2(s.sum() - product) / l2(product));
    }
    return {worst < 1e-12, fmt("max relative error %.2e over 50 pairs (tol 1e-12)", worst)};
}

// 4. Leray projection.
Verdict leray() {
    double idem = 0.0, grad = 0.0, div = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int dim = i % 2 == 0 ? 2 : 3;
        const Grid g(dim, dim == 2 ? 64 : 16);
        SpectralField v = random_field(g, 1, 300 + i);
        const SpectralField p = leray_project(v);
        idem = std::max(idem, (leray_project(p) - p).max_abs() / p.max_abs());
        div = std::max(div, divergence(p).max_abs() / p.max_abs());
        const SpectralField f = random_field(g, 0, 400 + i);
        grad = std::max(grad, leray_project(gradient(f)).max_abs() / gradient(f).max_abs());
    }
    const bool ok = idem < 1e-12 && grad < 1e-12 && div < 1e-12;
    return {ok, fmt("idempotence %.2e, gradient residue %.2e, divergence %.2e (tol 1e-12)", idem, grad, div)};
}

// 5. Heat semigroup.
Verdict heat() {
    const Grid g(2, 64);
    const DyadicPartition P(g);
    double wave = 0.0;
    const int ks[][2] = {{1, 0}, {3, -4}, {7, 2}, {0, 12}};
    for (const auto& k : ks)
        for (double a : {0.5, 1.0})
            for (double t : {0.001, 0.01, 0.1}) {
                const auto f = [&](double tt) {
                    return sample(g, 0, [&](int, auto x) {
                        const double rate = a * (k[0] * k[0] + k[1] * k[1]) * tt;
                        return std::exp(-rate) * std::cos(k[0] * x[0] + k[1] * x[1]);
                    });
                };
                const PhysicalField got = to_physical(heat_propagate(to_spectral(f(0.0)), a, t));
                const PhysicalField want = f(t);
                for (std::size_t m = 0; m < g.physical_size(); ++m)
                    wave = std::max(wave, std::abs(got.data()[m] - want.data()[m]));
            }

    double comp = 0.0;
    for (int i = 0; i < 10; ++i) {
        const SpectralField f = random_field(g, 0, 500 + i);
        const SpectralField two = heat_propagate(heat_propagate(f, 1.0, 0.003 * i), 1.0, 0.002);
        comp = std::max(comp, rel_diff(two, heat_propagate(f, 1.0, 0.003 * i + 0.002)));
    }

    // ‖e^{tΔ}Δ_q f‖ ≤ e^{-κ 2^{2q} t}‖Δ_q f‖ with κ = (3/4)²
    const double kappa = 9.0 / 16.0;
    double excess = -inf;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(P.q_min(), P.q_max());
    for (int i = 0; i < 100; ++i) {
        const int q = pick(rng);
        const SpectralField b = block_project(random_field(g, 0, 600 + i), q, P);
        for (double t : {0.0, 0.01, 0.1, 0.5}) {
            const double bound = std::exp(-kappa * std::ldexp(1.0, 2 * q) * t) * l2(b);
            excess = std::max(excess, l2(heat_propagate(b, 1.0, t)) / bound - 1.0);
        }
    }
    const bool ok = wave < 1e-12 && comp < 1e-13 && excess <= 1e-14;
    return {ok, fmt("plane wave %.2e (tol 1e-12), composition %.2e (tol 1e-13), block bound max ratio-1 %.2e",
                    wave, comp, excess)};
}

// 6. Chemin-Lerner norms against closed forms and Minkowski ordering.
Verdict chemin_lerner() {
    const double T = 2.0;
    const TimeGrid times = TimeGrid::uniform(0.0, T, 41);
    const double blocks[] = {0.3, 1.2, 0.7, 0.05};
    BlockNormSeries constant(-1, 4, 2.0);
    for (double t : times.samples()) constant.append(t, blocks);
    double const_err = 0.0;
    for (double rho : {1.0, 2.0, 4.0, inf}) {
        const BesovIndex b{0.5, 2.0, 1.0};
        const double want = (std::isinf(rho) ? 1.0 : std::pow(T, 1.0 / rho)) * contract_blocks(blocks, -1, b.s, b.r);
        const double got = chemin_lerner_norm(constant, {rho, b}, times);
        const_err = std::max(const_err, std::abs(got - want) / want);
    }

    // b(t) = e^{-t} at q = 1: ‖·‖ = 2^{qs} ((1 - e^{-ρT})/ρ)^{1/ρ}
    const TimeGrid fine = TimeGrid::uniform(0.0, 1.0, 1000);
    BlockNormSeries decay(1, 1, 2.0);
    for (double t : fine.samples()) {
        const double v[] = {std::exp(-t)};
        decay.append(t, v);
    }
    double exp_err = 0.0;
    for (double rho : {1.0, 2.0, 3.0}) {
        const double want = std::exp2(0.5) * std::pow((1.0 - std::exp(-rho)) / rho, 1.0 / rho);
        exp_err = std::max(exp_err, std::abs(chemin_lerner_norm(decay, {rho, {0.5, 2.0, 1.0}}, fine) - want));
    }

    int violations = 0;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const std::pair<double, double> pairs[] = {{1.0, inf}, {inf, 1.0}, {2.0, 2.0}};  // (r, ρ)
    for (int i = 0; i < 100; ++i) {
        const TimeGrid tg = TimeGrid::uniform(0.0, 1.0, 33);
        BlockNormSeries s(-1, 5, 2.0);
        std::vector<double> phase(5), rate(5);
        for (int q = 0; q < 5; ++q) {
            phase[q] = 6.3 * ud(rng);
            rate[q] = 5.0 * ud(rng);
        }
        for (double t : tg.samples()) {
            double v[5];
            for (int q = 0; q < 5; ++q) v[q] = std::exp(-rate[q] * t) * (1.1 + std::sin(phase[q] + 7.0 * t));
            s.append(t, v);
        }
        for (const auto& [r, rho] : pairs) {
            try {
                minkowski_compare(s, {rho, {0.25, 2.0, r}}, tg);
            } catch (const ConsistencyError&) {
                ++violations;
            }
        }
    }
    const bool ok = const_err < 1e-10 && exp_err < 1e-6 && violations == 0;
    return {ok, fmt("constant %.2e (tol 1e-10), e^{-t} %.2e (tol 1e-6), Minkowski violations %d/300", const_err,
                    exp_err, violations)};
}

// 7. Critical scaling for u and τ, single and multi-block, N = 2, 3.
Verdict scaling() {
    int failed = 0, run = 0;
    double worst = 0.0;
    for (int dim : {2, 3}) {
        const Grid g(dim, dim == 2 ? 64 : 32);
        const DyadicPartition P(g);
        SpectralField single(g, 1), multi(g, 1);
        single.set_coeff(1, {3, 0, 0}, {0.5, 0.0});
        multi.set_coeff(0, {1, 2, 0}, {0.3, 0.1});
        multi.set_coeff(1, {3, -1, dim == 3 ? 1 : 0}, {-0.2, 0.4});
        multi.set_coeff(dim - 1, {0, 5, 0}, {0.1, 0.0});
        multi.set_coeff(0, {-1, 1, dim == 3 ? 2 : 0}, {0.0, 0.25});
        for (const SpectralField* f : {&single, &multi})
            for (ScalingKind kind : {ScalingKind::velocity, ScalingKind::director}) {
                const ScalingResult r = scaling_check(*f, 1, kind, P);
                ++run;
                failed += !r.passed;
                worst = std::max(worst, std::abs(r.rescaled - r.original) / r.original);
            }
    }
    return {failed == 0, fmt("%d/%d checks passed, max relative mismatch %.2e (tol 1e-10)", run - failed, run, worst)};
}

// 8. Fourth-order convergence of the direct stepper.
Verdict solver_order() {
    const Grid g(2, 64);
    const DyadicPartition P(g);
    const double A = 0.01, T = 0.1;
    const int kk = 10;
    State s0{SpectralField(g, 1), SpectralField(g, 1), 0.0};
    const int ks[3][2] = {{kk, 3}, {-kk + 2, kk - 1}, {kk - 1, -2}};
    for (int m = 0; m < 3; ++m) {
        s0.u.set_coeff(0, {ks[m][0], ks[m][1], 0}, {A, 0.3 * A * m});
        s0.u.set_coeff(1, {ks[m][1], ks[m][0], 0}, {0.5 * A, -A});
        s0.tau.set_coeff(1, {ks[m][1], -ks[m][0], 0}, {A, 0.2 * A});
    }
    s0.u = leray_project(s0.u);
    std::vector<State> finals;
    for (int n : {180, 360, 720}) {
        SolverConfig cfg;
        cfg.T_end = T;
        cfg.dt = T / n;
        cfg.monitor_stride = 1 << 20;
        finals.push_back(solve(s0, cfg, P).trajectory.snapshots.back());
    }
    const auto diff = [](const State& a, const State& b) { return l2(a.u - b.u) + l2(a.tau - b.tau); };
    const double e1 = diff(finals[0], finals[1]), e2 = diff(finals[1], finals[2]);
    const double ratio = e1 / e2;
    return {std::abs(ratio - 16.0) <= 2.0,
            fmt("Richardson ratio %.3f (target 16 +- 2), E0 = %.3f, successive differences %.2e, %.2e", ratio,
                critical_norm(s0, P), e1, e2)};
}

struct SmallRun {
    State initial;
    DyadicPartition P;
};

SmallRun small_data(int M) {
    const Grid g(2, M);
    DyadicPartition P(g);
    State s = make_preset("single-mode", g, 1e-3, 1, P);
    return {std::move(s), std::move(P)};
}

// 9. Small-data boundedness over T = 10.
Verdict small_data_bound() {
    const auto t0 = std::chrono::steady_clock::now();
    const SmallRun run = small_data(64);
    SolverConfig cfg;
    cfg.T_end = 10.0;
    cfg.monitor_stride = 10;
    const SolveResult r = solve(run.initial, cfg, run.P);
    const double E0 = critical_norm(run.initial, run.P);
    const RunReport rep = build_report(r.trajectory, r.outcome, CriterionConfig::defaults(2), 2);
    double maxE = 0.0;
    bool monotone = true, finite = true;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const ReportRow& row = rep.rows[i];
        maxE = std::max(maxE, row.E);
        finite = finite && std::isfinite(row.crit1) && std::isfinite(row.crit2) && std::isfinite(row.crit3);
        if (i > 0) {
            const ReportRow& prev = rep.rows[i - 1];
            monotone = monotone && row.crit1 >= prev.crit1 && row.crit2 >= prev.crit2 && row.crit3 >= prev.crit3;
        }
    }
    const double dt = seconds_since(t0);
    const bool ok = r.outcome.status == SolveOutcome::Status::finished && std::abs(E0 - 1e-3) < 1e-12 &&
                    maxE <= 10.0 * E0 && monotone && finite && dt < 300.0;
    return {ok, fmt("E0 = %.3e, max E = %.3e (limit %.1e), final E = %.3e, criteria monotone %s finite %s, "
                    "%zu steps in %.1f s (limit 300 s)",
                    E0, maxE, 10.0 * E0, rep.rows.back().E, monotone ? "yes" : "no", finite ? "yes" : "no",
                    r.outcome.steps, dt)};
}

// 10. Picard contraction on the same data over T = 0.5.
Verdict picard() {
    const SmallRun run = small_data(64);
    SolverConfig cfg;
    cfg.T_end = 0.5;
    cfg.store_stride = 1;
    cfg.mode = SolverMode::picard;
    const SolveResult pic = solve(run.initial, cfg, run.P);
    cfg.mode = SolverMode::direct;
    const SolveResult dir = solve(run.initial, cfg, run.P);

    const auto& ratios = pic.outcome.picard_ratios;
    const auto& dist = pic.outcome.picard_distances;
    // first iteration from which every ratio is at most 1/2
    std::size_t from = ratios.size();
    for (std::size_t n = ratios.size(); n-- > 0;) {
        if (ratios[n] > 0.5) break;
        from = n;
    }
    const bool contracts = !ratios.empty() && from < 5;

    double sup = inf;
    const auto& a = pic.trajectory.snapshots;
    const auto& b = dir.trajectory.snapshots;
    if (a.size() == b.size()) {
        sup = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            sup = std::max(sup, besov_norm(a[i].u - b[i].u, {0.0, 2.0, 1.0}, run.P));
    }
    std::string d;
    for (double v : dist) d += fmt("%.1e ", v);
    const bool ok = pic.outcome.status == SolveOutcome::Status::finished && contracts && sup < 1e-5;
    return {ok, fmt("distances [ %s], first ratio %.2e, ratio <= 0.5 from iteration %zu, sup_t |u_P - u_D| = %.2e "
                    "(tol 1e-5), horizon %.3f",
                    d.c_str(), ratios.empty() ? NAN : ratios.front(), from + 1, sup, pic.outcome.contraction_horizon)};
}

// 11. Unit-sphere drift at M = 128 over T = 1 without renormalization.
Verdict sphere() {
    const auto t0 = std::chrono::steady_clock::now();
    const SmallRun run = small_data(128);
    SolverConfig cfg;
    cfg.T_end = 1.0;
    cfg.monitor_stride = 10;
    cfg.store_stride = 50;
    const SolveResult r = solve(run.initial, cfg, run.P);
    double sampled = 0.0;
    for (const Sample& s : r.trajectory.samples) sampled = std::max(sampled, s.drift);
    const double drift = std::max(sampled, unit_sphere_drift(r.trajectory));
    const bool ok = r.outcome.status == SolveOutcome::Status::finished && drift < 1e-5;
    return {ok, fmt("max drift %.2e (tol 1e-5), %zu steps in %.1f s", drift, r.outcome.steps, seconds_since(t0))};
}

// 12. Admissibility gate.
Verdict admissibility() {
    const Admissibility edge = criterion_admissible({4.0, 4.0, 4.0}, 2);
    const Admissibility ok3 = criterion_admissible({4.0, 3.0, 3.0}, 2);
    bool rejected = false;
    try {
        require_admissible({4.0, 4.0, 4.0}, 2);
    } catch (const PreconditionError&) {
        rejected = true;
    }
    const bool ok = std::abs(edge.margin) < 1e-15 && !edge.admissible && rejected && ok3.admissible &&
                    std::abs(ok3.margin - 1.0 / 3.0) < 1e-15;
    return {ok, fmt("(N=2, 4, 4): margin %.3g, admissible %s; (N=2, 3, 3): margin %.6f, admissible %s", edge.margin,
                    edge.admissible ? "yes" : "no", ok3.margin, ok3.admissible ? "yes" : "no")};
}

}  // namespace

int main() {
    mallopt(M_TOP_PAD, 64 << 20);
    kernels::configure_threads_from_env();

    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"partition telescoping", telescoping},
        {"Littlewood-Paley reconstruction", reconstruction},
        {"Bony identity", bony},
        {"Leray projection", leray},
        {"heat semigroup", heat},
        {"Chemin-Lerner closed forms", chemin_lerner},
        {"critical scaling", scaling},
        {"solver order", solver_order},
        {"small-data boundedness", small_data_bound},
        {"Picard contraction", picard},
        {"unit-sphere preservation", sphere},
        {"admissibility gate", admissibility},
    };

    int failures = 0;
    int id = 0;
    for (const auto& [name, check] : criteria) {
        ++id;
        Verdict v{false, ""};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", id - failures, id);
    return failures == 0 ? 0 : 1;
}
