#pragma once

#include "blc/besov.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace blc {

/// (u, τ, t) with τ = d − d̄₀ and d̄₀ a fixed unit vector.
///
/// u is divergence-free with zero mean. The mean of τ is not forced to zero:
/// the director equation moves it through |∇τ|²d, and dropping that would
/// break |d| = 1. Homogeneous norms never see it (it sits in residual_low).
struct State {
    SpectralField u;
    SpectralField tau;
    double t = 0.0;
    std::array<double, 3> dbar{1.0, 0.0, 0.0};

    const Grid& grid() const { return u.grid(); }
};

enum class SolverMode { direct, picard };

struct SolverConfig {
    double mu = 1.0;
    /// Diffusivity of the standalone heat-semigroup probes.
    double a = 1.0;
    /// Requested step; 0 picks the largest step the stability rule allows.
    double dt = 0.0;
    double T_end = 1.0;
    SolverMode mode = SolverMode::direct;
    double picard_tol = 1e-13;
    int picard_max_iter = 30;
    bool renormalize_director = false;
    /// Abort once E(t) exceeds this multiple of E(0).
    double blowup_threshold = 1e6;
    /// Debug switch: false drops both nonlinear right-hand sides.
    bool nonlinear = true;
    /// Record block norms and diagnostics every this many steps.
    int monitor_stride = 1;
    /// Keep a full State every this many steps; 0 keeps only the first and last.
    int store_stride = 0;

    void validate() const;
};

/// Scalar diagnostics recorded at every monitored step.
struct Sample {
    double t = 0.0;
    /// ‖u‖_{Ḃ^{N/2-1}_{2,1}} + ‖τ‖_{Ḃ^{N/2}_{2,1}}
    double critical = 0.0;
    /// ½‖u‖² + ½‖∇d‖², L² taken as the root mean square over the grid
    double energy = 0.0;
    /// max_x ||τ + d̄₀| − 1|
    double drift = 0.0;
    /// max |ξ·û| over modes
    double divergence = 0.0;
};

struct Trajectory {
    std::vector<State> snapshots;
    BlockNormSeries u_l2, u_linf, tau_l2, tau_linf;
    std::vector<Sample> samples;
    int q_min = 0;
    int q_max = 0;

    TimeGrid sample_times() const;
};

struct SolveOutcome {
    enum class Status { finished, blowup, no_convergence };
    Status status = Status::finished;
    /// Last time at which the state was finite and under the threshold.
    double last_valid_time = 0.0;
    std::string reason;
    std::size_t steps = 0;
    double dt = 0.0;
    /// Picard mode only: successive-iterate distances and their ratios.
    std::vector<double> picard_distances;
    std::vector<double> picard_ratios;
    double contraction_horizon = 0.0;

    bool blowup() const noexcept { return status == Status::blowup; }
};

struct SolveResult {
    Trajectory trajectory;
    SolveOutcome outcome;
};

/// Mode-wise e^{-a|ξ|²dt}.
SpectralField heat_propagate(const SpectralField& f, double a, double dt);

struct NonlinearTerms {
    SpectralField velocity;  // −P[u·∇u + ∇·(∇τ⊙∇τ)]
    SpectralField director;  // −u·∇τ + |∇τ|²τ + |∇τ|²d̄₀
};

NonlinearTerms nonlinear_terms(const State& s);
SpectralField rhs_velocity(const State& s);
SpectralField rhs_director(const State& s);

/// Largest step allowed by
/// dt <= min(0.5/(max|u| k_max), 0.25/(k_max² max(1, ‖∇τ‖_∞))), k_max = ⌊M/3⌋k0.
double stable_dt(const State& s);

struct StepPlan {
    double dt;
    std::size_t steps;
};

/// Uniform steps from s.t to cfg.T_end no longer than cfg.dt (or stable_dt(s)
/// when cfg.dt is 0). Throws PreconditionError if cfg.dt breaks the rule.
StepPlan plan_steps(const State& s, const SolverConfig& cfg);

/// ‖u‖_{Ḃ^{N/2-1}_{2,1}} + ‖τ‖_{Ḃ^{N/2}_{2,1}}
double critical_norm(const State& s, const DyadicPartition& P);
Sample measure(const State& s, const DyadicPartition& P);

/// Integrating-factor RK4 for a pack of fields v_t = −κ_i|ξ|² v_i + F_i(t, v).
/// The linear part is integrated exactly.
class ExponentialRk4 {
public:
    using Pack = std::vector<SpectralField>;
    using Rhs = std::function<Pack(double, const Pack&)>;

    ExponentialRk4(const Grid& grid, std::vector<double> diffusivity, double h);

    double step_size() const noexcept { return h_; }
    Pack step(double t, const Pack& v, const Rhs& rhs) const;

private:
    Pack decay(const Pack& v, bool half) const;
    Grid grid_;
    double h_;
    std::vector<std::vector<double>> half_;  // e^{-κ|ξ|²h/2}
    std::vector<std::vector<double>> full_;  // e^{-κ|ξ|²h}
};

/// One IF-RK4 step of the reformulated system with cfg.dt (which must be > 0).
/// Throws BlowupError on non-finite output.
State step_direct(const State& s, const SolverConfig& cfg);

/// Runs the direct stepper (or the Picard scheme, per cfg.mode) to cfg.T_end,
/// recording diagnostics. `on_step` sees every accepted state.
SolveResult solve(const State& initial, const SolverConfig& cfg, const DyadicPartition& P,
                  const std::function<void(const State&, std::size_t)>& on_step = {});

/// ∫_{t_0}^{t_K} e^{a(t_K−s)Δ} G(s) ds, trapezoid rule with the exact
/// per-mode factor inside.
SpectralField duhamel_integral(std::span<const SpectralField> forcing, const TimeGrid& times, double a);

struct PicardResult {
    /// All iterates when keep_all, otherwise only the last.
    std::vector<Trajectory> iterates;
    /// distances[n] = sup_t ‖u_{n+2} − u_{n+1}‖ + sup_t ‖τ_{n+2} − τ_{n+1}‖ (critical norms)
    std::vector<double> distances;
    /// ratios[n] = distances[n+1] / distances[n]
    std::vector<double> ratios;
    bool converged = false;
    int iterations = 0;
    double dt = 0.0;
    /// Largest sample time up to which every resolvable successive distance
    /// contracted by at least 1/2.
    double contraction_horizon = 0.0;
};

/// Picard scheme: u_1 = e^{μtΔ}u_0, τ_1 = e^{tΔ}τ_0, then each iterate solves
/// the linear heat problems forced by the previous one.
PicardResult picard_iterate(const State& initial, double T, const SolverConfig& cfg,
                            const DyadicPartition& P, bool keep_all = false);

/// Fills block norms and samples for every stored snapshot.
void record_diagnostics(Trajectory& traj, const DyadicPartition& P);

}  // namespace blc
