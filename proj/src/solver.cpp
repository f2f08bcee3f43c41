#include "blc/solver.hpp"

#include "blc/errors.hpp"
#include "blc/kernels.hpp"
#include "blc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace blc {

void SolverConfig::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw PreconditionError("viscosity mu must be positive");
    if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("heat coefficient a must be positive");
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive (or 0 for automatic)");
    if (!(T_end > 0.0) || !std::isfinite(T_end)) throw PreconditionError("T_end must be positive");
    if (!(picard_tol > 0.0)) throw PreconditionError("picard_tol must be positive");
    if (picard_max_iter < 1) throw PreconditionError("picard_max_iter must be at least 1");
    if (!(blowup_threshold > 1.0)) throw PreconditionError("blowup_threshold must exceed 1");
    if (monitor_stride < 1) throw PreconditionError("monitor_stride must be at least 1");
    if (store_stride < 0) throw PreconditionError("store_stride must be non-negative");
}

TimeGrid Trajectory::sample_times() const {
    std::vector<double> t;
    t.reserve(samples.size());
    for (const auto& s : samples) t.push_back(s.t);
    return TimeGrid(std::move(t));
}

namespace {

std::vector<double> decay_factors(const Grid& g, double kappa, double dt) {
    const auto& t = frequencies(g);
    std::vector<double> m(t.xi_norm2.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(-kappa * t.xi_norm2[i] * dt);
    return m;
}

bool finite(const SpectralField& f) {
    return std::ranges::all_of(f.data(), [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

void check_state(const State& s) {
    if (s.u.rank() != 1 || s.tau.rank() != 1) throw ShapeError("State: u and tau must be vector fields");
    require_same_shape(s.u.grid(), 1, s.tau.grid(), 1, "State");
    double n2 = 0.0;
    for (int i = 0; i < s.grid().dim(); ++i) n2 += s.dbar[static_cast<std::size_t>(i)] * s.dbar[static_cast<std::size_t>(i)];
    for (int i = s.grid().dim(); i < 3; ++i)
        if (s.dbar[static_cast<std::size_t>(i)] != 0.0) throw PreconditionError("State: dbar has components beyond N");
    if (std::abs(n2 - 1.0) > 1e-14) throw PreconditionError("State: |dbar| must be 1");
}

// out_i = Σ_j a_j g(i, j), all in physical space.
PhysicalField contract_advection(const PhysicalField& a, const PhysicalField& g) {
    const int N = a.grid().dim();
    PhysicalField out(a.grid(), 1);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) kernels::multiply_add(a.component(j), g.entry(i, j), 1.0, out.component(i));
    return out;
}

double pointwise_max(const PhysicalField& f) {
    if (f.components() == 1) return f.max_abs();
    PhysicalField mag(f.grid(), 0);
    kernels::pointwise_norm(f.data(), f.components(), mag.data());
    return mag.max_abs();
}

}  // namespace

SpectralField heat_propagate(const SpectralField& f, double a, double dt) {
    if (!(dt >= 0.0)) throw PreconditionError("heat_propagate: dt must be non-negative");
    return apply_multiplier(f, decay_factors(f.grid(), a, dt));
}

NonlinearTerms nonlinear_terms(const State& s) {
    check_state(s);
    const Grid& g = s.grid();
    const int N = g.dim();

    const PhysicalField up = to_physical(s.u);
    const PhysicalField gu = to_physical(gradient(s.u));
    const PhysicalField tp = to_physical(s.tau);
    const PhysicalField gt = to_physical(gradient(s.tau));  // entry (k, j) = ∂_j τ_k

    PhysicalField gram(g, 2);
    PhysicalField grad2(g, 0);
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            for (int k = 0; k < N; ++k)
                kernels::multiply_add(gt.entry(k, i), gt.entry(k, j), 1.0, gram.entry(i, j));
            if (j != i) std::ranges::copy(gram.entry(i, j), gram.entry(j, i).begin());
        }
    for (int i = 0; i < gt.components(); ++i)
        kernels::multiply_add(gt.component(i), gt.component(i), 1.0, grad2.data());

    SpectralField momentum = dealias(to_spectral(contract_advection(up, gu)));
    momentum += divergence(dealias(to_spectral(gram)));
    SpectralField velocity = leray_project(momentum);
    velocity *= -1.0;
    remove_mean(velocity);

    const PhysicalField g2 = to_physical(dealias(to_spectral(grad2)));
    PhysicalField cubic(g, 1);
    for (int i = 0; i < N; ++i) {
        auto dst = cubic.component(i);
        const auto src = tp.component(i);
        const auto w = g2.component(0);
        const double shift = s.dbar[static_cast<std::size_t>(i)];
        for (std::size_t m = 0; m < dst.size(); ++m) dst[m] = w[m] * (src[m] + shift);
    }
    SpectralField director = dealias(to_spectral(cubic));
    director -= dealias(to_spectral(contract_advection(up, gt)));

    return {std::move(velocity), std::move(director)};
}

SpectralField rhs_velocity(const State& s) { return nonlinear_terms(s).velocity; }
SpectralField rhs_director(const State& s) { return nonlinear_terms(s).director; }

double stable_dt(const State& s) {
    check_state(s);
    const Grid& g = s.grid();
    const double kmax = g.dealias_cutoff() * g.k0();
    const double umax = pointwise_max(to_physical(s.u));
    const double gmax = pointwise_max(to_physical(gradient(s.tau)));
    if (!std::isfinite(umax) || !std::isfinite(gmax))
        throw BlowupError("stable_dt: non-finite state", s.t);
    const double advective = umax > 0.0 ? 0.5 / (umax * kmax) : std::numeric_limits<double>::infinity();
    const double parabolic = 0.25 / (kmax * kmax * std::max(1.0, gmax));
    return std::min(advective, parabolic);
}

StepPlan plan_steps(const State& s, const SolverConfig& cfg) {
    const double span = cfg.T_end - s.t;
    if (!(span > 0.0)) throw PreconditionError("plan_steps: T_end must lie after the state time");
    const double limit = stable_dt(s);
    double h = cfg.dt;
    if (h == 0.0)
        h = limit;
    else if (h > limit * (1.0 + 1e-12))
        throw PreconditionError("dt = " + std::to_string(h) + " violates the stability rule (limit " +
                                std::to_string(limit) + ")");
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / h - 1e-9)));
    return {span / static_cast<double>(steps), steps};
}

double critical_norm(const State& s, const DyadicPartition& P) {
    const double N = s.grid().dim();
    return besov_norm(s.u, {N / 2.0 - 1.0, 2.0, 1.0}, P) + besov_norm(s.tau, {N / 2.0, 2.0, 1.0}, P);
}

Sample measure(const State& s, const DyadicPartition& P) {
    const Grid& g = s.grid();
    const auto& t = frequencies(g);
    const int N = g.dim();
    Sample out;
    out.t = s.t;
    out.critical = critical_norm(s, P);

    const std::vector<double> ones(g.spectral_size(), 1.0);
    double ku = 0.0;
    double kd = 0.0;
    for (int c = 0; c < N; ++c) {
        ku += kernels::weighted_norm2(s.u.component(c), t.weight, ones);
        kd += kernels::weighted_norm2(s.tau.component(c), t.weight, t.xi_norm);
    }
    out.energy = 0.5 * ku + 0.5 * kd;

    const PhysicalField tp = to_physical(s.tau);
    double drift = 0.0;
    for (std::size_t m = 0; m < g.physical_size(); ++m) {
        double n2 = 0.0;
        for (int c = 0; c < N; ++c) {
            const double d = tp.component(c)[m] + s.dbar[static_cast<std::size_t>(c)];
            n2 += d * d;
        }
        drift = std::max(drift, std::abs(std::sqrt(n2) - 1.0));
    }
    out.drift = drift;

    const SpectralField div = divergence(s.u);
    out.divergence = div.max_abs();
    return out;
}

ExponentialRk4::ExponentialRk4(const Grid& grid, std::vector<double> diffusivity, double h)
    : grid_(grid), h_(h) {
    if (!(h > 0.0)) throw PreconditionError("ExponentialRk4: step must be positive");
    for (double kappa : diffusivity) {
        half_.push_back(decay_factors(grid, kappa, 0.5 * h));
        full_.push_back(decay_factors(grid, kappa, h));
    }
}

ExponentialRk4::Pack ExponentialRk4::decay(const Pack& v, bool half) const {
    if (v.size() != full_.size()) throw ShapeError("ExponentialRk4: pack size mismatch");
    Pack out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(apply_multiplier(v[i], half ? half_[i] : full_[i]));
    return out;
}

namespace {

ExponentialRk4::Pack combine(const ExponentialRk4::Pack& a, double s, const ExponentialRk4::Pack& b) {
    ExponentialRk4::Pack out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].axpy(s, b[i]);
    return out;
}

}  // namespace

ExponentialRk4::Pack ExponentialRk4::step(double t, const Pack& v, const Rhs& rhs) const {
    const double h = h_;
    const Pack k1 = rhs(t, v);
    const Pack k2 = rhs(t + 0.5 * h, decay(combine(v, 0.5 * h, k1), true));
    const Pack k3 = rhs(t + 0.5 * h, combine(decay(v, true), 0.5 * h, k2));
    const Pack k4 = rhs(t + h, combine(decay(v, false), h, decay(k3, true)));

    Pack mid = k2;
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] += k3[i];
    Pack out = decay(v, false);
    const Pack e1 = decay(k1, false);
    const Pack e2 = decay(mid, true);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].axpy(h / 6.0, e1[i]);
        out[i].axpy(h / 3.0, e2[i]);
        out[i].axpy(h / 6.0, k4[i]);
    }
    return out;
}

namespace {

void renormalize(State& s) {
    const Grid& g = s.grid();
    const int N = g.dim();
    PhysicalField d = to_physical(s.tau);
    for (std::size_t m = 0; m < g.physical_size(); ++m) {
        double n2 = 0.0;
        for (int c = 0; c < N; ++c) {
            const double v = d.component(c)[m] + s.dbar[static_cast<std::size_t>(c)];
            n2 += v * v;
        }
        const double n = std::sqrt(n2);
        if (n == 0.0) continue;
        for (int c = 0; c < N; ++c) {
            const double dc = s.dbar[static_cast<std::size_t>(c)];
            d.component(c)[m] = (d.component(c)[m] + dc) / n - dc;
        }
    }
    s.tau = dealias(to_spectral(d));
}

ExponentialRk4::Rhs system_rhs(const State& like, bool nonlinear) {
    return [dbar = like.dbar, nonlinear](double t, const ExponentialRk4::Pack& v) {
        if (!nonlinear) return ExponentialRk4::Pack{SpectralField(v[0].grid(), 1), SpectralField(v[1].grid(), 1)};
        NonlinearTerms nl = nonlinear_terms(State{v[0], v[1], t, dbar});
        return ExponentialRk4::Pack{std::move(nl.velocity), std::move(nl.director)};
    };
}

State advance(const State& s, const ExponentialRk4& stepper, const ExponentialRk4::Rhs& rhs, bool renorm) {
    ExponentialRk4::Pack next = stepper.step(s.t, {s.u, s.tau}, rhs);
    State out{leray_project(next[0]), std::move(next[1]), s.t + stepper.step_size(), s.dbar};
    remove_mean(out.u);
    if (!finite(out.u) || !finite(out.tau)) throw BlowupError("non-finite state after step", s.t);
    if (renorm) renormalize(out);
    return out;
}

// Decides which states become snapshots and which get diagnostics.
class Recorder {
public:
    Recorder(const SolverConfig& cfg, const DyadicPartition& P, Trajectory& traj)
        : cfg_(cfg), P_(P), traj_(traj) {
        const int blocks = P.block_count();
        traj.u_l2 = BlockNormSeries(P.q_min(), blocks, 2.0);
        traj.u_linf = BlockNormSeries(P.q_min(), blocks, inf);
        traj.tau_l2 = BlockNormSeries(P.q_min(), blocks, 2.0);
        traj.tau_linf = BlockNormSeries(P.q_min(), blocks, inf);
        traj.q_min = P.q_min();
        traj.q_max = P.q_max();
    }

    void offer(const State& s, std::size_t step, bool last) {
        const auto ms = static_cast<std::size_t>(cfg_.monitor_stride);
        if (step % ms == 0 || last) record(s);
        const bool store = cfg_.store_stride == 0 ? (step == 0 || last)
                                                  : (step % static_cast<std::size_t>(cfg_.store_stride) == 0 || last);
        if (store && (traj_.snapshots.empty() || traj_.snapshots.back().t < s.t)) traj_.snapshots.push_back(s);
    }

    void record(const State& s) {
        if (!traj_.samples.empty() && !(s.t > traj_.samples.back().t)) return;
        traj_.u_l2.append(s.t, block_lp_norms(s.u, P_, 2.0));
        traj_.u_linf.append(s.t, block_lp_norms(s.u, P_, inf));
        traj_.tau_l2.append(s.t, block_lp_norms(s.tau, P_, 2.0));
        traj_.tau_linf.append(s.t, block_lp_norms(s.tau, P_, inf));
        traj_.samples.push_back(measure(s, P_));
    }

private:
    const SolverConfig& cfg_;
    const DyadicPartition& P_;
    Trajectory& traj_;
};

}  // namespace

State step_direct(const State& s, const SolverConfig& cfg) {
    check_state(s);
    if (!(cfg.dt > 0.0)) throw PreconditionError("step_direct: dt must be positive");
    const ExponentialRk4 stepper(s.grid(), {cfg.mu, 1.0}, cfg.dt);
    return advance(s, stepper, system_rhs(s, cfg.nonlinear), cfg.renormalize_director);
}

void record_diagnostics(Trajectory& traj, const DyadicPartition& P) {
    traj.samples.clear();
    SolverConfig cfg;
    Recorder rec(cfg, P, traj);
    for (const auto& s : traj.snapshots) rec.record(s);
}

namespace {

SolveResult solve_direct(const State& initial, const SolverConfig& cfg, const DyadicPartition& P,
                         const std::function<void(const State&, std::size_t)>& on_step) {
    SolveResult res;
    const StepPlan plan = plan_steps(initial, cfg);
    res.outcome.dt = plan.dt;
    res.outcome.last_valid_time = initial.t;
    Recorder rec(cfg, P, res.trajectory);

    const ExponentialRk4 stepper(initial.grid(), {cfg.mu, 1.0}, plan.dt);
    const auto rhs = system_rhs(initial, cfg.nonlinear);
    const double e0 = critical_norm(initial, P);

    State s = initial;
    rec.offer(s, 0, false);
    if (on_step) on_step(s, 0);
    for (std::size_t n = 1; n <= plan.steps; ++n) {
        State next = s;
        try {
            next = advance(s, stepper, rhs, cfg.renormalize_director);
            if (n == plan.steps) next.t = cfg.T_end;
            const double e = critical_norm(next, P);
            if (e0 > 0.0 && e > cfg.blowup_threshold * e0)
                throw BlowupError("critical norm exceeded " + std::to_string(cfg.blowup_threshold) +
                                      " times its initial value",
                                  s.t);
        } catch (const BlowupError& err) {
            rec.record(s);
            if (res.trajectory.snapshots.back().t < s.t) res.trajectory.snapshots.push_back(s);
            res.outcome.status = SolveOutcome::Status::blowup;
            res.outcome.reason = err.what();
            res.outcome.last_valid_time = s.t;
            return res;
        }
        s = std::move(next);
        res.outcome.steps = n;
        res.outcome.last_valid_time = s.t;
        rec.offer(s, n, n == plan.steps);
        if (on_step) on_step(s, n);
    }
    return res;
}

SolveResult solve_picard(const State& initial, const SolverConfig& cfg, const DyadicPartition& P,
                         const std::function<void(const State&, std::size_t)>& on_step) {
    SolveResult res;
    PicardResult pr = picard_iterate(initial, cfg.T_end - initial.t, cfg, P);
    res.trajectory = std::move(pr.iterates.back());
    res.outcome.dt = pr.dt;
    res.outcome.steps = res.trajectory.snapshots.empty() ? 0 : static_cast<std::size_t>(std::llround((cfg.T_end - initial.t) / pr.dt));
    res.outcome.picard_distances = pr.distances;
    res.outcome.picard_ratios = pr.ratios;
    res.outcome.contraction_horizon = pr.contraction_horizon;
    res.outcome.last_valid_time = res.trajectory.samples.empty() ? initial.t : res.trajectory.samples.back().t;
    if (!pr.converged) {
        res.outcome.status = SolveOutcome::Status::no_convergence;
        res.outcome.reason = "Picard iteration did not reach tolerance in " + std::to_string(pr.iterations) + " iterations";
    }
    if (on_step)
        for (std::size_t i = 0; i < res.trajectory.snapshots.size(); ++i) on_step(res.trajectory.snapshots[i], i);
    return res;
}

}  // namespace

SolveResult solve(const State& initial, const SolverConfig& cfg, const DyadicPartition& P,
                  const std::function<void(const State&, std::size_t)>& on_step) {
    cfg.validate();
    check_state(initial);
    if (!(initial.grid() == P.grid())) throw ShapeError("solve: partition built for another grid");
    return cfg.mode == SolverMode::direct ? solve_direct(initial, cfg, P, on_step)
                                          : solve_picard(initial, cfg, P, on_step);
}

SpectralField duhamel_integral(std::span<const SpectralField> forcing, const TimeGrid& times, double a) {
    if (forcing.empty()) throw PreconditionError("duhamel_integral: empty forcing");
    if (forcing.size() != times.size()) throw ShapeError("duhamel_integral: forcing and time grid differ in length");
    const auto t = times.samples();
    SpectralField acc(forcing.front().grid(), forcing.front().rank());
    for (std::size_t j = 0; j + 1 < forcing.size(); ++j) {
        const double h = t[j + 1] - t[j];
        const auto e = decay_factors(acc.grid(), a, h);
        SpectralField next = forcing[j];
        next *= 0.5 * h;
        next += acc;
        acc = apply_multiplier(next, e);
        acc.axpy(0.5 * h, forcing[j + 1]);
    }
    return acc;
}

namespace {

double distance(const State& a, const State& b, const DyadicPartition& P) {
    const State d{a.u - b.u, a.tau - b.tau, a.t, a.dbar};
    return critical_norm(d, P);
}

Trajectory to_trajectory(const std::vector<State>& states, const SolverConfig& cfg, const DyadicPartition& P) {
    Trajectory traj;
    Recorder rec(cfg, P, traj);
    for (std::size_t i = 0; i < states.size(); ++i) rec.offer(states[i], i, i + 1 == states.size());
    return traj;
}

}  // namespace

PicardResult picard_iterate(const State& initial, double T, const SolverConfig& cfg, const DyadicPartition& P,
                            bool keep_all) {
    check_state(initial);
    if (!(T > 0.0)) throw PreconditionError("picard_iterate: T must be positive");
    SolverConfig local = cfg;
    local.T_end = initial.t + T;
    const StepPlan plan = plan_steps(initial, local);
    const double h = plan.dt;
    const Grid& g = initial.grid();

    PicardResult res;
    res.dt = h;

    std::vector<State> prev;
    prev.reserve(plan.steps + 1);
    for (std::size_t j = 0; j <= plan.steps; ++j) {
        const double tj = j == plan.steps ? local.T_end : initial.t + h * static_cast<double>(j);
        const double el = tj - initial.t;
        prev.push_back(State{heat_propagate(initial.u, cfg.mu, el), heat_propagate(initial.tau, 1.0, el), tj, initial.dbar});
    }
    res.iterations = 1;
    if (keep_all) res.iterates.push_back(to_trajectory(prev, local, P));

    const auto eu = decay_factors(g, cfg.mu, h);
    const auto et = decay_factors(g, 1.0, h);
    const auto rhs = system_rhs(initial, cfg.nonlinear);

    std::vector<std::vector<double>> pointwise;  // per-iteration distance at every time
    double scale = 0.0;
    for (int n = 2; n <= cfg.picard_max_iter + 1 && !res.converged; ++n) {
        std::vector<State> next;
        next.reserve(prev.size());
        next.push_back(initial);
        ExponentialRk4::Pack g_lo = rhs(prev[0].t, {prev[0].u, prev[0].tau});
        for (std::size_t j = 0; j + 1 < prev.size(); ++j) {
            ExponentialRk4::Pack g_hi = rhs(prev[j + 1].t, {prev[j + 1].u, prev[j + 1].tau});
            SpectralField u = next[j].u;
            u.axpy(0.5 * h, g_lo[0]);
            u = apply_multiplier(u, eu);
            u.axpy(0.5 * h, g_hi[0]);
            SpectralField tau = next[j].tau;
            tau.axpy(0.5 * h, g_lo[1]);
            tau = apply_multiplier(tau, et);
            tau.axpy(0.5 * h, g_hi[1]);
            State s{leray_project(u), std::move(tau), prev[j + 1].t, initial.dbar};
            remove_mean(s.u);
            if (!finite(s.u) || !finite(s.tau)) throw BlowupError("Picard iterate became non-finite", prev[j].t);
            next.push_back(std::move(s));
            g_lo = std::move(g_hi);
        }

        std::vector<double> dist(next.size());
        double sup = 0.0;
        for (std::size_t j = 0; j < next.size(); ++j) {
            dist[j] = distance(next[j], prev[j], P);
            sup = std::max(sup, dist[j]);
            scale = std::max(scale, critical_norm(next[j], P));
        }
        pointwise.push_back(std::move(dist));
        res.distances.push_back(sup);
        if (res.distances.size() >= 2) {
            const double d0 = res.distances[res.distances.size() - 2];
            res.ratios.push_back(d0 > 0.0 ? sup / d0 : 0.0);
        }
        res.iterations = n;
        prev = std::move(next);
        if (keep_all) res.iterates.push_back(to_trajectory(prev, local, P));
        if (sup < cfg.picard_tol) res.converged = true;
    }
    if (!keep_all) res.iterates.push_back(to_trajectory(prev, local, P));

    // contraction horizon: running sup in time of each successive distance
    const double floor = std::max(cfg.picard_tol, 1e-14 * scale);
    const std::size_t K = prev.size();
    std::vector<std::vector<double>> running(pointwise.size(), std::vector<double>(K));
    for (std::size_t n = 0; n < pointwise.size(); ++n) {
        double m = 0.0;
        for (std::size_t j = 0; j < K; ++j) running[n][j] = m = std::max(m, pointwise[n][j]);
    }
    res.contraction_horizon = prev.front().t;
    for (std::size_t j = 0; j < K; ++j) {
        bool ok = true;
        for (std::size_t n = 0; n + 1 < running.size() && ok; ++n)
            if (running[n][j] > floor && running[n + 1][j] > 0.5 * running[n][j]) ok = false;
        if (!ok) break;
        res.contraction_horizon = prev[j].t;
    }
    return res;
}

}  // namespace blc
