#include "blc/grid.hpp"

#include "blc/errors.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

namespace blc {

Grid::Grid(int dim, int points_per_axis, double period)
    : dim_(dim), points_(points_per_axis), period_(period) {
    if (dim != 2 && dim != 3)
        throw ShapeError("Grid: dimension must be 2 or 3, got " + std::to_string(dim));
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
        throw ShapeError("Grid: points per axis must be even and >= 8, got " +
                         std::to_string(points_per_axis));
    if (!(period > 0.0) || !std::isfinite(period))
        throw ShapeError("Grid: period must be positive");
    physical_size_ = 1;
    for (int a = 0; a < dim; ++a) physical_size_ *= static_cast<std::size_t>(points_per_axis);
    spectral_size_ = physical_size_ / static_cast<std::size_t>(points_per_axis) *
                     static_cast<std::size_t>(half_points());
}

std::array<int, 3> Grid::mode(std::size_t idx) const noexcept {
    const auto H = static_cast<std::size_t>(half_points());
    const auto M = static_cast<std::size_t>(points_);
    auto wrap = [this](std::size_t i) {
        const int s = static_cast<int>(i);
        return s <= points_ / 2 ? s : s - points_;
    };
    std::array<int, 3> k{0, 0, 0};
    const int last = static_cast<int>(idx % H);
    std::size_t rest = idx / H;
    if (dim_ == 2) {
        k[0] = wrap(rest);
        k[1] = last;
    } else {
        k[1] = wrap(rest % M);
        k[0] = wrap(rest / M);
        k[2] = last;
    }
    return k;
}

std::size_t Grid::spectral_index(const std::array<int, 3>& k) const {
    const int M = points_;
    auto full = [M](int ki) {
        if (ki <= -M / 2 || ki > M / 2) throw PreconditionError("Grid: wave number out of range");
        return static_cast<std::size_t>(ki < 0 ? ki + M : ki);
    };
    const int last = k[static_cast<std::size_t>(dim_ - 1)];
    if (last < 0 || last > M / 2) throw PreconditionError("Grid: last-axis mode must be in [0, M/2]");
    const auto H = static_cast<std::size_t>(half_points());
    if (dim_ == 2) return full(k[0]) * H + static_cast<std::size_t>(last);
    return (full(k[0]) * static_cast<std::size_t>(M) + full(k[1])) * H +
           static_cast<std::size_t>(last);
}

namespace {

std::unique_ptr<FrequencyTable> build_table(const Grid& g) {
    auto t = std::make_unique<FrequencyTable>();
    const std::size_t n = g.spectral_size();
    t->k.resize(n);
    t->xi.resize(n);
    t->xi_norm.resize(n);
    t->xi_norm2.resize(n);
    t->xi_odd.resize(n);
    t->weight.resize(n);
    t->dealias_mask.resize(n);
    const int M = g.points();
    const int cut = g.dealias_cutoff();
    const auto N = static_cast<std::size_t>(g.dim());
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = g.mode(i);
        t->k[i] = k;
        double r2 = 0.0;
        bool keep = true;
        for (std::size_t a = 0; a < 3; ++a) {
            const double xa = a < N ? g.k0() * k[a] : 0.0;
            t->xi[i][a] = xa;
            t->xi_odd[i][a] = (a < N && std::abs(k[a]) == M / 2) ? 0.0 : xa;
            r2 += xa * xa;
            if (a < N && std::abs(k[a]) > cut) keep = false;
        }
        t->xi_norm2[i] = r2;
        t->xi_norm[i] = std::sqrt(r2);
        const int last = k[N - 1];
        t->weight[i] = (last == 0 || last == M / 2) ? 1.0 : 2.0;
        t->dealias_mask[i] = keep ? 1.0 : 0.0;
    }
    return t;
}

}  // namespace

const FrequencyTable& frequencies(const Grid& grid) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, double>, std::unique_ptr<FrequencyTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{grid.dim(), grid.points(), grid.period()}];
    if (!slot) slot = build_table(grid);
    return *slot;
}

}  // namespace blc
