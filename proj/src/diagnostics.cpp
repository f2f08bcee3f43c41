#include "blc/diagnostics.hpp"

#include "blc/errors.hpp"
#include "blc/snapshot.hpp"
#include "blc/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace blc {

CriterionConfig CriterionConfig::defaults(int dim) {
    if (dim == 3) return {4.0, 4.0, 4.0};
    return {4.0, 3.0, 3.0};
}

Admissibility criterion_admissible(const CriterionConfig& cfg, int dim) {
    double margin = dim / 2.0 + 2.0 / cfg.rho2 + 2.0 / cfg.rho3 - 2.0;
    if (std::abs(margin) <= 1e-12) margin = 0.0;
    return {margin, margin > 0.0};
}

void require_admissible(const CriterionConfig& cfg, int dim) {
    for (double rho : {cfg.rho1, cfg.rho2, cfg.rho3})
        if (!(rho > 2.0) || std::isinf(rho))
            throw PreconditionError("criterion exponent " + std::to_string(rho) + " outside (2, inf)");
    const Admissibility a = criterion_admissible(cfg, dim);
    if (!a.admissible) {
        std::ostringstream msg;
        msg << "inadmissible criterion exponents: N/2 + 2/rho2 + 2/rho3 - 2 = " << a.margin << " is not positive";
        throw PreconditionError(msg.str());
    }
}

namespace {

struct CriterionIndices {
    CheminLernerIndex velocity, director_linf, director_l2;
};

CriterionIndices indices(const CriterionConfig& cfg, int dim) {
    return {{cfg.rho1, {-1.0 + 2.0 / cfg.rho1, inf, inf}},
            {cfg.rho2, {2.0 / cfg.rho2, inf, inf}},
            {cfg.rho3, {dim / 2.0 + 2.0 / cfg.rho3, 2.0, inf}}};
}

int trajectory_dim(const Trajectory& traj) {
    if (!traj.snapshots.empty()) return traj.snapshots.front().grid().dim();
    throw PreconditionError("trajectory without snapshots");
}

}  // namespace

CriterionNorms criterion_norms(const Trajectory& traj, const CriterionConfig& cfg, double up_to) {
    const int dim = trajectory_dim(traj);
    require_admissible(cfg, dim);
    const BlockNormSeries u = traj.u_linf.truncated(up_to);
    if (u.size() == 0) return {};
    const BlockNormSeries ti = traj.tau_linf.truncated(up_to);
    const BlockNormSeries t2 = traj.tau_l2.truncated(up_to);
    const TimeGrid times = u.time_grid();
    const CriterionIndices idx = indices(cfg, dim);
    return {chemin_lerner_norm(u, idx.velocity, times), chemin_lerner_norm(ti, idx.director_linf, times),
            chemin_lerner_norm(t2, idx.director_l2, times)};
}

SpectralField dyadic_rescale(const SpectralField& f, int lambda_exp, double s, const DyadicPartition& P) {
    if (lambda_exp < 1) throw PreconditionError("dyadic_rescale: lambda exponent must be a positive integer");
    if (!(f.grid() == P.grid())) throw ShapeError("dyadic_rescale: partition built for another grid");
    const Grid& g = f.grid();
    const int lambda = 1 << lambda_exp;
    const int cut = g.dealias_cutoff();

    // coefficients at transform roundoff relative to the largest one are dropped
    const double floor = 1e-14 * f.max_abs();
    SpectralField kept = f;
    for (int c = 0; c < kept.components(); ++c)
        for (auto& v : kept.component(c))
            if (std::abs(v) <= floor) v = 0.0;

    const auto norms = block_lp_norms(kept, P, 2.0);
    for (int q = P.q_min(); q <= P.q_max(); ++q)
        if (norms[static_cast<std::size_t>(q - P.q_min())] > 0.0 && q + lambda_exp > P.q_max())
            throw PreconditionError("dyadic_rescale: block " + std::to_string(q) + " would shift past q_max = " +
                                    std::to_string(P.q_max()));

    const double amp = std::exp2(-s * lambda_exp);
    SpectralField out(g, f.rank());
    for (std::size_t m = 0; m < g.spectral_size(); ++m) {
        std::array<int, 3> k = g.mode(m);
        bool zero = true;
        for (int c = 0; c < kept.components(); ++c) zero = zero && kept.component(c)[m] == cplx(0.0);
        if (zero) continue;
        for (int a = 0; a < g.dim(); ++a) {
            k[static_cast<std::size_t>(a)] *= lambda;
            if (std::abs(k[static_cast<std::size_t>(a)]) > cut)
                throw PreconditionError("dyadic_rescale: rescaled mode leaves the dealiased box");
        }
        const std::size_t target = g.spectral_index(k);
        for (int c = 0; c < f.components(); ++c) out.component(c)[target] = amp * kept.component(c)[m];
    }
    return out;
}

ScalingResult scaling_check(const SpectralField& f, int lambda_exp, ScalingKind kind, const DyadicPartition& P) {
    const double N = f.grid().dim();
    const BesovIndex idx{kind == ScalingKind::velocity ? N / 2.0 - 1.0 : N / 2.0, 2.0, 1.0};
    const double before = besov_norm(f, idx, P);
    const double after = besov_norm(dyadic_rescale(f, lambda_exp, idx.s, P), idx, P);
    const double scale = std::max(before, std::numeric_limits<double>::min());
    return {before, after, std::abs(after - before) <= 1e-10 * scale};
}

double unit_sphere_drift(const Trajectory& traj) {
    double drift = 0.0;
    for (const State& s : traj.snapshots) {
        const int N = s.grid().dim();
        const PhysicalField tp = to_physical(s.tau);
        for (std::size_t m = 0; m < s.grid().physical_size(); ++m) {
            double n2 = 0.0;
            for (int c = 0; c < N; ++c) {
                const double d = tp.component(c)[m] + s.dbar[static_cast<std::size_t>(c)];
                n2 += d * d;
            }
            drift = std::max(drift, std::abs(std::sqrt(n2) - 1.0));
        }
    }
    return drift;
}

namespace {

// Chemin-Lerner norm over [t_0, t_i] for growing i, one trapezoid panel at a time.
class RunningCheminLerner {
public:
    RunningCheminLerner(const BlockNormSeries& series, const CheminLernerIndex& idx)
        : series_(series), idx_(idx), integral_(static_cast<std::size_t>(series.block_count()), 0.0) {}

    double advance(std::size_t i) {
        const auto b = series_.at_sample(i);
        const bool sup = std::isinf(idx_.rho);
        if (i > 0) {
            const auto a = series_.at_sample(i - 1);
            const double h = series_.times()[i] - series_.times()[i - 1];
            for (std::size_t q = 0; q < integral_.size(); ++q) {
                if (sup)
                    integral_[q] = std::max(integral_[q], std::abs(b[q]));
                else
                    integral_[q] += 0.5 * h * (std::pow(std::abs(a[q]), idx_.rho) + std::pow(std::abs(b[q]), idx_.rho));
            }
        } else if (sup) {
            for (std::size_t q = 0; q < integral_.size(); ++q) integral_[q] = std::abs(b[q]);
        }
        std::vector<double> per_block(integral_.size());
        for (std::size_t q = 0; q < integral_.size(); ++q)
            per_block[q] = sup ? integral_[q] : std::pow(integral_[q], 1.0 / idx_.rho);
        return contract_blocks(per_block, series_.q_min(), idx_.besov.s, idx_.besov.r);
    }

private:
    const BlockNormSeries& series_;
    CheminLernerIndex idx_;
    std::vector<double> integral_;
};

}  // namespace

RunReport build_report(const Trajectory& traj, const SolveOutcome& outcome, const CriterionConfig& cfg, int dim) {
    require_admissible(cfg, dim);
    RunReport rep;
    rep.dim = dim;
    rep.points = traj.snapshots.empty() ? 0 : traj.snapshots.front().grid().points();
    rep.q_min = traj.q_min;
    rep.q_max = traj.q_max;
    rep.criterion = cfg;
    rep.outcome = outcome;

    const CriterionIndices idx = indices(cfg, dim);
    RunningCheminLerner c1(traj.u_linf, idx.velocity);
    RunningCheminLerner c2(traj.tau_linf, idx.director_linf);
    RunningCheminLerner c3(traj.tau_l2, idx.director_l2);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const Sample& s = traj.samples[i];
        ReportRow row{s.t, s.critical, c1.advance(i), c2.advance(i), c3.advance(i), s.drift, s.energy, false};
        rep.rows.push_back(row);
    }
    if (outcome.blowup() && !rep.rows.empty()) {
        rep.rows.back().blowup = true;
        const double t0 = rep.rows.front().t;
        const double t1 = rep.rows.back().t;
        std::size_t mid = 0;
        while (mid + 1 < rep.rows.size() && rep.rows[mid].t < 0.5 * (t0 + t1)) ++mid;
        const ReportRow& a = rep.rows[mid];
        const ReportRow& b = rep.rows.back();
        const auto growth = [](double from, double to) {
            if (from > 0.0) return to / from;
            return to > 0.0 ? inf : 1.0;
        };
        const double g[3] = {growth(a.crit1, b.crit1), growth(a.crit2, b.crit2), growth(a.crit3, b.crit3)};
        const char* names[3] = {"crit1", "crit2", "crit3"};
        rep.fastest_growing = names[std::max_element(g, g + 3) - g];
    }
    return rep;
}

void write_report_csv(const RunReport& report, std::ostream& out) {
    out << "t,E,crit1,crit2,crit3,drift,energy,blowup_flag\n";
    out << std::setprecision(17);
    for (const ReportRow& r : report.rows)
        out << r.t << ',' << r.E << ',' << r.crit1 << ',' << r.crit2 << ',' << r.crit3 << ',' << r.drift << ','
            << r.energy << ',' << (r.blowup ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("report.csv: write failed");
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "t,E,crit1,crit2,crit3,drift,energy,blowup_flag")
        throw std::runtime_error("report.csv: unexpected header");
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 8) throw std::runtime_error("report.csv: expected 8 columns");
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7] != 0.0});
    }
    return rows;
}

namespace {

const char* status_name(SolveOutcome::Status s) {
    switch (s) {
        case SolveOutcome::Status::finished: return "finished";
        case SolveOutcome::Status::blowup: return "blowup";
        case SolveOutcome::Status::no_convergence: return "no_convergence";
    }
    return "unknown";
}

}  // namespace

void write_summary_json(const RunReport& report, const ConfigEcho& config, std::ostream& out) {
    using nlohmann::json;
    json j;
    json cfg = json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    j["q_range"] = {{"q_min", report.q_min}, {"q_max", report.q_max}, {"truncated", true}};
    j["criterion"] = {{"rho1", report.criterion.rho1},
                      {"rho2", report.criterion.rho2},
                      {"rho3", report.criterion.rho3},
                      {"margin", criterion_admissible(report.criterion, report.dim).margin},
                      {"labels",
                       {"crit1: ||u|| in L~^rho1(B^{-1+2/rho1}_{inf,inf}) (truncated q_range)",
                        "crit2: ||tau|| in L~^rho2(B^{2/rho2}_{inf,inf}) (truncated q_range)",
                        "crit3: ||tau|| in L~^rho3(B^{N/2+2/rho3}_{2,inf})"}}};
    const SolveOutcome& o = report.outcome;
    j["status"] = status_name(o.status);
    j["steps"] = o.steps;
    j["dt"] = o.dt;
    j["last_valid_time"] = o.last_valid_time;
    if (!o.reason.empty()) j["reason"] = o.reason;
    j["blowup"] = {{"flag", o.blowup()}, {"time", o.blowup() ? json(o.last_valid_time) : json(nullptr)}};
    if (!report.fastest_growing.empty()) j["blowup"]["fastest_growing"] = report.fastest_growing;

    json fin = json::object();
    if (!report.rows.empty()) {
        const ReportRow& first = report.rows.front();
        const ReportRow& last = report.rows.back();
        double maxE = 0.0, maxDrift = 0.0;
        for (const ReportRow& r : report.rows) {
            maxE = std::max(maxE, r.E);
            maxDrift = std::max(maxDrift, r.drift);
        }
        fin = {{"t", last.t},         {"E", last.E},           {"crit1", last.crit1},
               {"crit2", last.crit2}, {"crit3", last.crit3},   {"drift", last.drift},
               {"energy", last.energy}, {"E0", first.E},       {"max_E", maxE},
               {"max_drift", maxDrift}, {"energy0", first.energy}};
    }
    j["final"] = fin;
    if (!o.picard_distances.empty()) {
        j["picard"] = {{"distances", o.picard_distances},
                       {"contraction_ratios", o.picard_ratios},
                       {"contraction_horizon", o.contraction_horizon}};
    }
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("summary.json: write failed");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw std::runtime_error("config: bad number for " + key + ": '" + v + "'");
    return d;
}

long to_integer(const std::string& key, const std::string& v) {
    long n = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw std::runtime_error("config: bad integer for " + key + ": '" + v + "'");
    return n;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw std::runtime_error("config: bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

void apply_config_stream(std::istream& in, RunOptions& o) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        if (key == "preset") o.preset = v;
        else if (key == "eps") o.eps = to_double(key, v);
        else if (key == "N") o.dim = static_cast<int>(to_integer(key, v));
        else if (key == "M") o.points = static_cast<int>(to_integer(key, v));
        else if (key == "T") o.T = to_double(key, v);
        else if (key == "dt") o.dt = to_double(key, v);
        else if (key == "mode") {
            if (v == "direct") o.mode = SolverMode::direct;
            else if (v == "picard") o.mode = SolverMode::picard;
            else throw std::runtime_error("config: mode must be direct or picard");
        }
        else if (key == "rho1") o.rho1 = to_double(key, v);
        else if (key == "rho2") o.rho2 = to_double(key, v);
        else if (key == "rho3") o.rho3 = to_double(key, v);
        else if (key == "mu") o.mu = to_double(key, v);
        else if (key == "seed") o.seed = static_cast<std::uint64_t>(to_integer(key, v));
        else if (key == "out") o.out = v;
        else if (key == "monitor_stride") o.monitor_stride = static_cast<int>(to_integer(key, v));
        else if (key == "snapshot_stride") o.snapshot_stride = static_cast<int>(to_integer(key, v));
        else if (key == "picard_tol") o.picard_tol = to_double(key, v);
        else if (key == "picard_max_iter") o.picard_max_iter = static_cast<int>(to_integer(key, v));
        else if (key == "renormalize_director") o.renormalize = to_bool(key, v);
        else if (key == "blowup_threshold") o.blowup_threshold = to_double(key, v);
        else if (key == "resume") o.resume = v;
        else throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
}

void apply_config_file(const std::filesystem::path& path, RunOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    apply_config_stream(in, opts);
}

namespace {

using Generator = std::function<double(const std::array<double, 3>&)>;

PhysicalField sample(const Grid& g, const std::vector<Generator>& comps) {
    PhysicalField f(g, comps.size() == 1 ? 0 : 1);
    for (std::size_t m = 0; m < g.physical_size(); ++m) {
        const auto x = f.position(m);
        for (std::size_t c = 0; c < comps.size(); ++c) f.component(static_cast<int>(c))[m] = comps[c](x);
    }
    return f;
}

SpectralField velocity_from(const PhysicalField& raw) {
    SpectralField u = leray_project(dealias(to_spectral(raw)));
    remove_mean(u);
    return u;
}

// τ = R(θ, φ)e₁ − e₁ with d = cos θ e₁ + sin θ (cos φ e₂ + sin φ e₃).
SpectralField director_from(const Grid& g, const PhysicalField& theta, const PhysicalField* phi, double B) {
    const int N = g.dim();
    PhysicalField tau(g, 1);
    for (std::size_t m = 0; m < g.physical_size(); ++m) {
        const double th = B * theta.component(0)[m];
        const double ph = phi ? phi->component(0)[m] : 0.0;
        const double half = std::sin(0.5 * th);
        tau.component(0)[m] = -2.0 * half * half;  // cos θ − 1 without cancellation
        if (N == 2) {
            tau.component(1)[m] = std::sin(th);
        } else {
            tau.component(1)[m] = std::sin(th) * std::cos(ph);
            tau.component(2)[m] = std::sin(th) * std::sin(ph);
        }
    }
    return to_spectral(tau);
}

PhysicalField random_band(const Grid& g, int ncomp, std::mt19937_64& rng) {
    const int N = g.dim();
    std::uniform_int_distribution<int> kd(-4, 4);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    PhysicalField f(g, ncomp == 1 ? 0 : 1);
    for (int mode = 0; mode < 12; ++mode) {
        std::array<int, 3> k{0, 0, 0};
        int norm = 0;
        while (norm == 0) {
            for (int a = 0; a < N; ++a) k[static_cast<std::size_t>(a)] = kd(rng);
            norm = std::abs(k[0]) + std::abs(k[1]) + std::abs(k[2]);
        }
        for (int c = 0; c < ncomp; ++c) {
            const double amp = ud(rng);
            const double th = phase(rng);
            auto dst = f.component(c);
            for (std::size_t m = 0; m < g.physical_size(); ++m) {
                const auto x = f.position(m);
                double kx = 0.0;
                for (int a = 0; a < N; ++a) kx += k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
                dst[m] += amp * std::cos(kx + th);
            }
        }
    }
    return f;
}

}  // namespace

State make_preset(const std::string& name, const Grid& g, double eps, std::uint64_t seed, const DyadicPartition& P) {
    const int N = g.dim();
    State s{SpectralField(g, 1), SpectralField(g, 1), 0.0, {1.0, 0.0, 0.0}};
    if (std::find(std::begin(preset_names), std::end(preset_names), name) == std::end(preset_names))
        throw PreconditionError("unknown preset '" + name + "'");
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw PreconditionError("eps must be non-negative");
    if (name == "zero" || eps == 0.0) return s;

    std::optional<PhysicalField> raw_u, theta, phi;
    using X = const std::array<double, 3>&;
    if (name == "single-mode") {
        // u ∥ sin(k·x) with a ⊥ k; director tilted along a second mode
        if (N == 2) {
            raw_u = sample(g, {[](X x) { return 2.0 * std::sin(x[0] + 2.0 * x[1]); },
                               [](X x) { return -std::sin(x[0] + 2.0 * x[1]); }});
            theta = sample(g, {[](X x) { return std::cos(2.0 * x[0] - x[1]); }});
        } else {
            raw_u = sample(g, {[](X x) { return 2.0 * std::sin(x[0] + 2.0 * x[1] + x[2]); },
                               [](X x) { return -std::sin(x[0] + 2.0 * x[1] + x[2]); },
                               [](X) { return 0.0; }});
            theta = sample(g, {[](X x) { return std::cos(2.0 * x[0] - x[1] + x[2]); }});
        }
    } else if (name == "taylor-green") {
        if (N == 2) {
            raw_u = sample(g, {[](X x) { return std::sin(x[0]) * std::cos(x[1]); },
                               [](X x) { return -std::cos(x[0]) * std::sin(x[1]); }});
        } else {
            raw_u = sample(g, {[](X x) { return std::sin(x[0]) * std::cos(x[1]) * std::cos(x[2]); },
                               [](X x) { return -std::cos(x[0]) * std::sin(x[1]) * std::cos(x[2]); },
                               [](X) { return 0.0; }});
            phi = sample(g, {[](X x) { return 0.5 * std::cos(x[2]); }});
        }
        theta = sample(g, {[](X x) { return std::sin(x[0]) * std::sin(x[1]); }});
    } else {
        std::mt19937_64 rng(seed);
        raw_u = random_band(g, N, rng);
        theta = random_band(g, 1, rng);
        if (N == 3) phi = random_band(g, 1, rng);
    }

    const double target = 0.5 * eps;
    const BesovIndex iu{N / 2.0 - 1.0, 2.0, 1.0};
    const BesovIndex it{N / 2.0, 2.0, 1.0};
    s.u = velocity_from(*raw_u);
    const double un = besov_norm(s.u, iu, P);
    if (un > 0.0) s.u *= target / un;

    const PhysicalField* ph = phi ? &*phi : nullptr;
    double B = 1e-3;
    double tn = besov_norm(director_from(g, *theta, ph, B), it, P);
    if (!(tn > 0.0)) throw PreconditionError("preset '" + name + "' has no resolvable director content");
    B *= target / tn;
    for (int iter = 0; iter < 50; ++iter) {
        tn = besov_norm(director_from(g, *theta, ph, B), it, P);
        const double next = B * target / tn;
        if (std::abs(next - B) <= 1e-15 * std::abs(B)) break;
        B = next;
    }
    s.tau = director_from(g, *theta, ph, B);
    return s;
}

void write_state(const std::filesystem::path& path, const State& s) {
    const PhysicalField u = to_physical(s.u);
    const PhysicalField tau = to_physical(s.tau);
    const PhysicalField* fields[] = {&u, &tau};
    write_snapshot(path, fields, s.t);
}

State read_state(const std::filesystem::path& path) {
    auto records = read_snapshot(path);
    if (records.size() != 2 || records[0].field.rank() != 1 || records[1].field.rank() != 1)
        throw std::runtime_error("state file must hold a velocity and a director record: " + path.string());
    SpectralField u = leray_project(dealias(to_spectral(records[0].field)));
    remove_mean(u);
    return State{std::move(u), to_spectral(records[1].field), records[0].time, {1.0, 0.0, 0.0}};
}

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

ConfigEcho echo(const RunOptions& o, const CriterionConfig& c) {
    return {{"preset", o.preset},
            {"eps", fmt(o.eps)},
            {"N", std::to_string(o.dim)},
            {"M", std::to_string(o.points)},
            {"T", fmt(o.T)},
            {"dt", fmt(o.dt)},
            {"mode", o.mode == SolverMode::direct ? "direct" : "picard"},
            {"rho1", fmt(c.rho1)},
            {"rho2", fmt(c.rho2)},
            {"rho3", fmt(c.rho3)},
            {"mu", fmt(o.mu)},
            {"seed", std::to_string(o.seed)},
            {"monitor_stride", std::to_string(o.monitor_stride)},
            {"snapshot_stride", std::to_string(o.snapshot_stride)},
            {"renormalize_director", o.renormalize ? "true" : "false"},
            {"blowup_threshold", fmt(o.blowup_threshold)},
            {"resume", o.resume ? o.resume->string() : ""}};
}

std::filesystem::path state_path(const std::filesystem::path& dir, std::size_t step) {
    char name[32];
    std::snprintf(name, sizeof name, "state_%06zu.blcf", step);
    return dir / name;
}

int check_scaling(const State& s, const DyadicPartition& P, std::ostream& log) {
    bool ok = true;
    const int N = s.grid().dim();
    const auto run = [&](const SpectralField& f, ScalingKind kind, const char* label, double idx) {
        try {
            const ScalingResult r = scaling_check(f, 1, kind, P);
            log << "scaling " << label << " B^" << idx << "_{2,1}: original " << fmt(r.original) << " rescaled "
                << fmt(r.rescaled) << ' ' << (r.passed ? "PASS" : "FAIL") << '\n';
            ok = ok && r.passed;
        } catch (const PreconditionError& e) {
            log << "scaling " << label << ": FAIL (" << e.what() << ")\n";
            ok = false;
        }
    };
    run(s.u, ScalingKind::velocity, "u", N / 2.0 - 1.0);
    run(s.tau, ScalingKind::director, "tau", N / 2.0);
    return ok ? exit_clean : exit_numerical;
}

}  // namespace

int execute_run(const RunOptions& o, std::ostream& log) {
    CriterionConfig crit = CriterionConfig::defaults(o.dim);
    if (o.rho1) crit.rho1 = *o.rho1;
    if (o.rho2) crit.rho2 = *o.rho2;
    if (o.rho3) crit.rho3 = *o.rho3;

    std::optional<Grid> grid;
    std::optional<DyadicPartition> P;
    try {
        grid.emplace(o.dim, o.points);
        P.emplace(*grid);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    }
    try {
        require_admissible(crit, o.dim);
    } catch (const PreconditionError& e) {
        log << "error: " << e.what() << '\n';
        return exit_inadmissible;
    }

    State initial{SpectralField(*grid, 1), SpectralField(*grid, 1), 0.0, {1.0, 0.0, 0.0}};
    try {
        if (o.resume) {
            initial = read_state(*o.resume);
            if (!(initial.grid() == *grid)) throw PreconditionError("resume snapshot is on a different grid");
        } else {
            initial = make_preset(o.preset, *grid, o.eps, o.seed, *P);
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    }

    if (o.check_scaling) return check_scaling(initial, *P, log);

    SolverConfig cfg;
    cfg.mu = o.mu;
    cfg.dt = o.dt;
    cfg.T_end = o.T;
    cfg.mode = o.mode;
    cfg.picard_tol = o.picard_tol;
    cfg.picard_max_iter = o.picard_max_iter;
    cfg.renormalize_director = o.renormalize;
    cfg.blowup_threshold = o.blowup_threshold;
    cfg.monitor_stride = o.monitor_stride;
    cfg.store_stride = o.mode == SolverMode::picard ? o.snapshot_stride : 0;

    const auto snapdir = o.out / "snapshots";
    try {
        std::filesystem::create_directories(snapdir);
    } catch (const std::exception& e) {
        log << "error: cannot create " << snapdir << ": " << e.what() << '\n';
        return exit_usage;
    }

    SolveResult res;
    try {
        cfg.validate();
        const auto writer = [&](const State& s, std::size_t step) {
            if (o.mode != SolverMode::direct) return;
            if (step == 0 || (o.snapshot_stride > 0 && step % static_cast<std::size_t>(o.snapshot_stride) == 0))
                write_state(state_path(snapdir, step), s);
        };
        res = solve(initial, cfg, *P, writer);
        if (o.mode == SolverMode::direct) {
            write_state(state_path(snapdir, res.outcome.steps), res.trajectory.snapshots.back());
        } else {
            for (std::size_t i = 0; i < res.trajectory.snapshots.size(); ++i)
                write_state(state_path(snapdir, i), res.trajectory.snapshots[i]);
        }
    } catch (const PreconditionError& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const BlowupError& e) {
        log << "blow-up: " << e.what() << '\n';
        return exit_blowup;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }

    try {
        const RunReport rep = build_report(res.trajectory, res.outcome, crit, o.dim);
        std::ofstream csv(o.out / "report.csv");
        write_report_csv(rep, csv);
        std::ofstream norms(o.out / "norms.csv");
        const double N = o.dim;
        const NamedSeries named[] = {{"u_B^{N/2-1}_{2,1}", &res.trajectory.u_l2, {N / 2.0 - 1.0, 2.0, 1.0}},
                                     {"tau_B^{N/2}_{2,1}", &res.trajectory.tau_l2, {N / 2.0, 2.0, 1.0}}};
        write_norm_series_csv(norms, named);
        std::ofstream js(o.out / "summary.json");
        write_summary_json(rep, echo(o, crit), js);
        if (!rep.rows.empty()) {
            const ReportRow& last = rep.rows.back();
            log << "t = " << last.t << "  E = " << last.E << "  crit = (" << last.crit1 << ", " << last.crit2 << ", "
                << last.crit3 << ")  drift = " << last.drift << "  energy = " << last.energy << '\n';
        }
    } catch (const std::exception& e) {
        log << "error: writing results: " << e.what() << '\n';
        return exit_numerical;
    }

    switch (res.outcome.status) {
        case SolveOutcome::Status::finished:
            log << "finished after " << res.outcome.steps << " steps of dt = " << res.outcome.dt << '\n';
            return exit_clean;
        case SolveOutcome::Status::blowup:
            log << "blow-up at t = " << res.outcome.last_valid_time << ": " << res.outcome.reason << '\n';
            return exit_blowup;
        case SolveOutcome::Status::no_convergence:
            log << res.outcome.reason << '\n';
            return exit_numerical;
    }
    return exit_numerical;
}

}  // namespace blc
