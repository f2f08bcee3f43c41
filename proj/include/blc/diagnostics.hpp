#pragma once

#include "blc/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace blc {

/// Time exponents of the three blow-up criterion norms.
struct CriterionConfig {
    double rho1 = 4.0;
    double rho2 = 3.0;
    double rho3 = 3.0;

    /// ρ₁ = ρ₂ = ρ₃ = 4 for N = 3, ρ₁ = 4 and ρ₂ = ρ₃ = 3 for N = 2.
    static CriterionConfig defaults(int dim);
};

struct Admissibility {
    /// N/2 + 2/ρ₂ + 2/ρ₃ − 2
    double margin;
    /// margin > 0 (margins within 1e-12 of zero count as zero)
    bool admissible;
};

Admissibility criterion_admissible(const CriterionConfig& cfg, int dim);
/// Throws PreconditionError unless every ρ_i lies in (2, ∞) and the margin is positive.
void require_admissible(const CriterionConfig& cfg, int dim);

struct CriterionNorms {
    /// ‖u‖_{L̃^{ρ₁}(Ḃ^{−1+2/ρ₁}_{∞,∞})}
    double velocity = 0.0;
    /// ‖τ‖_{L̃^{ρ₂}(Ḃ^{2/ρ₂}_{∞,∞})}
    double director_linf = 0.0;
    /// ‖τ‖_{L̃^{ρ₃}(Ḃ^{N/2+2/ρ₃}_{2,∞})}
    double director_l2 = 0.0;
};

/// The three norms over the recorded samples with t <= up_to. The ∞,∞ norms
/// run over the resolvable blocks only.
CriterionNorms criterion_norms(const Trajectory& traj, const CriterionConfig& cfg, double up_to);

enum class ScalingKind { velocity, director };

struct ScalingResult {
    double original;
    double rescaled;
    bool passed;
};

/// f_λ with λ = 2^j: the mode at k moves to λk and is multiplied by λ^{-s}.
/// Throws PreconditionError if some nonzero block would leave the resolvable
/// range or a mode would leave the dealiased box.
SpectralField dyadic_rescale(const SpectralField& f, int lambda_exp, double s, const DyadicPartition& P);

/// Compares ‖f‖ and ‖f_λ‖ in Ḃ^{N/2−1}_{2,1} (velocity) or Ḃ^{N/2}_{2,1}
/// (director); passes when they agree to 1e-10 relative.
ScalingResult scaling_check(const SpectralField& f, int lambda_exp, ScalingKind kind, const DyadicPartition& P);

/// max over snapshots and grid points of ||τ + d̄₀| − 1|
double unit_sphere_drift(const Trajectory& traj);

struct ReportRow {
    double t = 0.0;
    double E = 0.0;
    double crit1 = 0.0;
    double crit2 = 0.0;
    double crit3 = 0.0;
    double drift = 0.0;
    double energy = 0.0;
    bool blowup = false;
};

struct RunReport {
    int dim = 2;
    int points = 0;
    int q_min = 0;
    int q_max = 0;
    CriterionConfig criterion;
    std::vector<ReportRow> rows;
    SolveOutcome outcome;
    /// Criterion that grew fastest over the second half of the run; set on blow-up.
    std::string fastest_growing;
};

/// Criterion norms at every sample time over the growing interval [t_0, t].
RunReport build_report(const Trajectory& traj, const SolveOutcome& outcome, const CriterionConfig& cfg, int dim);

/// Columns t, E, crit1, crit2, crit3, drift, energy, blowup_flag.
void write_report_csv(const RunReport& report, std::ostream& out);
std::vector<ReportRow> read_report_csv(std::istream& in);

/// Free-form key/value pairs echoed into the summary.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;
void write_summary_json(const RunReport& report, const ConfigEcho& config, std::ostream& out);

struct RunOptions {
    std::string preset = "single-mode";
    double eps = 1e-3;
    int dim = 2;
    int points = 64;
    double T = 1.0;
    double dt = 0.0;
    SolverMode mode = SolverMode::direct;
    std::optional<double> rho1, rho2, rho3;
    double mu = 1.0;
    std::uint64_t seed = 1;
    std::filesystem::path out = "blc_out";
    int monitor_stride = 1;
    /// Snapshot every this many steps; 0 writes only the first and last state.
    int snapshot_stride = 0;
    double picard_tol = 1e-13;
    int picard_max_iter = 30;
    bool renormalize = false;
    double blowup_threshold = 1e6;
    bool check_scaling = false;
    std::optional<std::filesystem::path> resume;
};

/// Reads `key = value` lines ('#' starts a comment) into `opts`. Throws
/// std::runtime_error on unknown keys or malformed values.
void apply_config_file(const std::filesystem::path& path, RunOptions& opts);
void apply_config_stream(std::istream& in, RunOptions& opts);

inline constexpr const char* preset_names[] = {"zero", "single-mode", "random-band", "taylor-green"};

/// Initial data of a named family with critical norm E₀ = eps (0 for "zero").
/// d̄₀ = e₁, and d₀ is built as a pointwise rotation of d̄₀, so |d₀| = 1.
/// Throws PreconditionError for an unknown name.
State make_preset(const std::string& name, const Grid& grid, double eps, std::uint64_t seed,
                  const DyadicPartition& P);

enum ExitCode : int {
    exit_clean = 0,
    exit_usage = 1,
    exit_blowup = 2,
    exit_inadmissible = 3,
    exit_numerical = 4,
};

/// Full run: initial data, solve, report.csv, summary.json, snapshots/*.blcf.
/// Progress and errors go to `log`.
int execute_run(const RunOptions& opts, std::ostream& log);

/// Reads a state file written by the run loop (u record followed by τ record).
State read_state(const std::filesystem::path& path);
void write_state(const std::filesystem::path& path, const State& s);

}  // namespace blc
