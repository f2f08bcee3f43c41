#include "blc/besov.hpp"

#include "blc/errors.hpp"
#include "blc/kernels.hpp"
#include "blc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace blc {

namespace {

void check_exponent(double e, const char* name) {
    if (!(e >= 1.0)) throw PreconditionError(std::string(name) + " must lie in [1, inf]");
}

}  // namespace

void validate(const BesovIndex& idx) {
    if (!std::isfinite(idx.s)) throw PreconditionError("regularity s must be finite");
    check_exponent(idx.p, "p");
    check_exponent(idx.r, "r");
}

void validate(const CheminLernerIndex& idx) {
    check_exponent(idx.rho, "rho");
    validate(idx.besov);
}

TimeGrid::TimeGrid(std::vector<double> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 1; i < samples_.size(); ++i)
        if (!(samples_[i] > samples_[i - 1]))
            throw PreconditionError("TimeGrid: samples must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double t0, double t1, std::size_t count) {
    if (count < 2 || !(t1 > t0)) throw PreconditionError("TimeGrid::uniform: need count >= 2 and t1 > t0");
    std::vector<double> s(count);
    for (std::size_t i = 0; i < count; ++i)
        s[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
    s.back() = t1;
    return TimeGrid(std::move(s));
}

void BlockNormSeries::append(double t, std::span<const double> per_block) {
    if (per_block.size() != static_cast<std::size_t>(blocks_))
        throw ShapeError("BlockNormSeries::append: wrong block count");
    if (!times_.empty() && !(t > times_.back()))
        throw PreconditionError("BlockNormSeries::append: times must increase");
    times_.push_back(t);
    values_.insert(values_.end(), per_block.begin(), per_block.end());
}

std::span<const double> BlockNormSeries::at_sample(std::size_t i) const {
    return {values_.data() + i * static_cast<std::size_t>(blocks_), static_cast<std::size_t>(blocks_)};
}

BlockNormSeries BlockNormSeries::truncated(double up_to) const {
    BlockNormSeries out(q_min_, blocks_, p_);
    for (std::size_t i = 0; i < times_.size() && times_[i] <= up_to; ++i) out.append(times_[i], at_sample(i));
    return out;
}

double lp_norm(const PhysicalField& f, double p) {
    check_exponent(p, "p");
    if (!f.all_finite())
        throw BlowupError("lp_norm: non-finite samples", std::numeric_limits<double>::quiet_NaN());
    std::span<const double> values = f.component(0);
    PhysicalField magnitude(f.grid(), 0);
    if (f.components() > 1) {
        kernels::pointwise_norm(f.data(), f.components(), magnitude.data());
        values = magnitude.data();
    }
    if (std::isinf(p)) return kernels::max_abs(values);
    const double mean = kernels::power_sum(values, p) / static_cast<double>(values.size());
    return std::pow(mean, 1.0 / p);
}

std::vector<double> block_lp_norms(const SpectralField& u, const DyadicPartition& P, double p) {
    check_exponent(p, "p");
    if (!(u.grid() == P.grid())) throw ShapeError("block_lp_norms: partition built for another grid");
    const auto& t = frequencies(u.grid());
    std::vector<double> out(static_cast<std::size_t>(P.block_count()));
    for (int q = P.q_min(); q <= P.q_max(); ++q) {
        double value;
        if (p == 2.0) {
            double sum = 0.0;
            for (int c = 0; c < u.components(); ++c)
                sum += kernels::weighted_norm2(u.component(c), t.weight, P.block_mask(q));
            value = std::sqrt(sum);
            if (!std::isfinite(value))
                throw BlowupError("block_lp_norms: non-finite coefficients",
                                  std::numeric_limits<double>::quiet_NaN());
        } else {
            value = lp_norm(to_physical(apply_multiplier(u, P.block_mask(q))), p);
        }
        out[static_cast<std::size_t>(q - P.q_min())] = value;
    }
    return out;
}

double contract_blocks(std::span<const double> per_block, int q_min, double s, double r) {
    check_exponent(r, "r");
    double acc = 0.0;
    for (std::size_t i = 0; i < per_block.size(); ++i) {
        const double w = std::exp2(static_cast<double>(q_min + static_cast<int>(i)) * s) * per_block[i];
        if (std::isinf(r))
            acc = std::max(acc, w);
        else
            acc += std::pow(w, r);
    }
    return std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
}

double besov_norm(const SpectralField& u, const BesovIndex& idx, const DyadicPartition& P) {
    validate(idx);
    return contract_blocks(block_lp_norms(u, P, idx.p), P.q_min(), idx.s, idx.r);
}

double time_lp(std::span<const double> values, const TimeGrid& times, double rho) {
    check_exponent(rho, "rho");
    if (times.empty()) throw PreconditionError("time norm over an empty time grid");
    if (values.size() != times.size()) throw ShapeError("time_lp: values and time grid differ in length");
    if (std::isinf(rho)) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    const auto t = times.samples();
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        integral += 0.5 * (t[i + 1] - t[i]) *
                    (std::pow(std::abs(values[i]), rho) + std::pow(std::abs(values[i + 1]), rho));
    return std::pow(integral, 1.0 / rho);
}

namespace {

void check_series(const BlockNormSeries& series, const TimeGrid& times) {
    if (times.empty() || series.size() == 0) throw PreconditionError("mixed norm over an empty time grid");
    if (series.size() != times.size()) throw ShapeError("block norm series and time grid differ in length");
}

}  // namespace

double chemin_lerner_norm(const BlockNormSeries& series, const CheminLernerIndex& idx,
                          const TimeGrid& times) {
    validate(idx);
    check_series(series, times);
    std::vector<double> per_block(static_cast<std::size_t>(series.block_count()));
    std::vector<double> history(series.size());
    for (int b = 0; b < series.block_count(); ++b) {
        for (std::size_t i = 0; i < series.size(); ++i) history[i] = series.at_sample(i)[static_cast<std::size_t>(b)];
        per_block[static_cast<std::size_t>(b)] = time_lp(history, times, idx.rho);
    }
    return contract_blocks(per_block, series.q_min(), idx.besov.s, idx.besov.r);
}

double lebesgue_besov_norm(const BlockNormSeries& series, const CheminLernerIndex& idx,
                           const TimeGrid& times) {
    validate(idx);
    check_series(series, times);
    std::vector<double> instant(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        instant[i] = contract_blocks(series.at_sample(i), series.q_min(), idx.besov.s, idx.besov.r);
    return time_lp(instant, times, idx.rho);
}

MinkowskiComparison minkowski_compare(const BlockNormSeries& series, const CheminLernerIndex& idx,
                                      const TimeGrid& times) {
    const double tilde = chemin_lerner_norm(series, idx, times);
    const double plain = lebesgue_besov_norm(series, idx, times);
    const double r = idx.besov.r;
    const int order = r == idx.rho ? 0 : (r < idx.rho ? 1 : -1);
    const double slack = 1e-12 * std::max({tilde, plain, std::numeric_limits<double>::min()});
    const bool ok = order == 0   ? std::abs(tilde - plain) <= slack
                    : order > 0 ? tilde >= plain - slack
                                : tilde <= plain + slack;
    if (!ok)
        throw ConsistencyError("Minkowski ordering violated: L~ = " + std::to_string(tilde) +
                               ", L = " + std::to_string(plain));
    return {tilde, plain, order};
}

void write_norm_series_csv(std::ostream& out, std::span<const NamedSeries> series) {
    out << "time,norm_name,value,q_min,q_max\n" << std::setprecision(17);
    for (const NamedSeries& ns : series) {
        validate(ns.index);
        for (std::size_t i = 0; i < ns.series->size(); ++i)
            out << ns.series->times()[i] << ',' << ns.name << ','
                << contract_blocks(ns.series->at_sample(i), ns.series->q_min(), ns.index.s, ns.index.r) << ','
                << ns.series->q_min() << ',' << ns.series->q_max() << '\n';
    }
}

}  // namespace blc
