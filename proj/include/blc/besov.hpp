#pragma once

#include "blc/littlewood_paley.hpp"

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blc {

/// Exponent value standing for ∞ in every p, r, ρ slot.
inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Ḃ^s_{p,r}
struct BesovIndex {
    double s = 0.0;
    double p = 2.0;
    double r = 1.0;
};

/// L̃^ρ_T(Ḃ^s_{p,r})
struct CheminLernerIndex {
    double rho = inf;
    BesovIndex besov;
};

/// Strictly increasing sample times t_0 < ... < t_K.
class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> samples);
    static TimeGrid uniform(double t0, double t1, std::size_t count);

    std::span<const double> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    double front() const { return samples_.front(); }
    double back() const { return samples_.back(); }

private:
    std::vector<double> samples_;
};

/// ‖Δ_q u(t_i)‖_{L^p} for every resolvable q and every recorded time.
class BlockNormSeries {
public:
    BlockNormSeries() = default;
    BlockNormSeries(int q_min, int block_count, double p) : q_min_(q_min), blocks_(block_count), p_(p) {}

    int q_min() const noexcept { return q_min_; }
    int q_max() const noexcept { return q_min_ + blocks_ - 1; }
    int block_count() const noexcept { return blocks_; }
    double p() const noexcept { return p_; }
    std::size_t size() const noexcept { return times_.size(); }

    void append(double t, std::span<const double> per_block);
    std::span<const double> times() const { return times_; }
    /// Norms of all blocks at sample i.
    std::span<const double> at_sample(std::size_t i) const;
    double at(int q, std::size_t i) const { return at_sample(i)[static_cast<std::size_t>(q - q_min_)]; }
    /// Samples with t <= up_to.
    BlockNormSeries truncated(double up_to) const;
    TimeGrid time_grid() const { return TimeGrid(times_); }

private:
    int q_min_ = 0;
    int blocks_ = 0;
    double p_ = 2.0;
    std::vector<double> times_;
    std::vector<double> values_;  // row-major, one row per sample
};

/// Discrete L^p: (mean of |f|^p)^{1/p}, max for p = ∞. Vector and tensor
/// fields use the pointwise Euclidean norm. Throws BlowupError on NaN/Inf.
double lp_norm(const PhysicalField& f, double p);

/// ‖Δ_q u‖_{L^p} for q = q_min..q_max. p = 2 goes through Parseval.
std::vector<double> block_lp_norms(const SpectralField& u, const DyadicPartition& P, double p);

/// (Σ_q (2^{qs} b_q)^r)^{1/r}, sup for r = ∞.
double contract_blocks(std::span<const double> per_block, int q_min, double s, double r);

/// ‖u‖_{Ḃ^s_{p,r}} over the resolvable blocks.
double besov_norm(const SpectralField& u, const BesovIndex& idx, const DyadicPartition& P);

/// Trapezoidal L^ρ over the time grid (max over samples for ρ = ∞). A single
/// sample has zero length and yields 0 for finite ρ.
double time_lp(std::span<const double> values, const TimeGrid& times, double rho);

/// ‖u‖_{L̃^ρ(Ḃ^s_{p,r})}: time norm per block first, then ℓ^r over q.
double chemin_lerner_norm(const BlockNormSeries& series, const CheminLernerIndex& idx,
                          const TimeGrid& times);
/// ‖u‖_{L^ρ(Ḃ^s_{p,r})}: Besov norm per instant first, then time norm.
double lebesgue_besov_norm(const BlockNormSeries& series, const CheminLernerIndex& idx,
                           const TimeGrid& times);

struct MinkowskiComparison {
    double chemin_lerner;
    double lebesgue;
    /// +1 if the index pair forces L̃ >= L (r <= ρ), −1 if L̃ <= L (r >= ρ),
    /// 0 if r = ρ (equality).
    int expected_order;
};

/// Evaluates both mixed norms and checks the ordering implied by Minkowski's
/// inequality; throws ConsistencyError if it fails beyond roundoff.
MinkowskiComparison minkowski_compare(const BlockNormSeries& series, const CheminLernerIndex& idx,
                                      const TimeGrid& times);

struct NamedSeries {
    std::string name;
    const BlockNormSeries* series;
    BesovIndex index;
};

/// CSV rows (time, norm_name, value, q_min, q_max): the Besov norm of every
/// recorded sample of every series.
void write_norm_series_csv(std::ostream& out, std::span<const NamedSeries> series);

void validate(const BesovIndex& idx);
void validate(const CheminLernerIndex& idx);

}  // namespace blc
