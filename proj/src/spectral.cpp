#include "blc/spectral.hpp"

#include "blc/errors.hpp"
#include "blc/kernels.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace blc {

namespace {

// One r2c/c2r plan pair per (dim, M). The planner is not thread safe, so plans
// are made under a lock; the new-array execute calls below are.
struct Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Plans(const Grid& g) {
        int n[3] = {g.points(), g.points(), g.points()};
        std::vector<double> real(g.physical_size());
        std::vector<cplx> spec(g.spectral_size());
        auto* sp = reinterpret_cast<fftw_complex*>(spec.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_dft_r2c(g.dim(), n, real.data(), sp, flags);
        backward = fftw_plan_dft_c2r(g.dim(), n, sp, real.data(), flags);
    }
    ~Plans() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

const Plans& plans_for(const Grid& g) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<Plans>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{g.dim(), g.points()}];
    if (!slot) slot = std::make_unique<Plans>(g);
    return *slot;
}

using index_t = std::ptrdiff_t;

}  // namespace

PhysicalField to_physical(const SpectralField& f) {
    const Grid& g = f.grid();
    const Plans& p = plans_for(g);
    PhysicalField out(g, f.rank());
#pragma omp parallel
    {
        // c2r overwrites its input
        std::vector<cplx> scratch(g.spectral_size());
#pragma omp for schedule(static)
        for (int c = 0; c < f.components(); ++c) {
            auto src = f.component(c);
            std::copy(src.begin(), src.end(), scratch.begin());
            fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(scratch.data()),
                                 out.component(c).data());
        }
    }
    return out;
}

SpectralField to_spectral(const PhysicalField& f) {
    const Grid& g = f.grid();
    const Plans& p = plans_for(g);
    SpectralField out(g, f.rank());
    const double scale = 1.0 / static_cast<double>(g.physical_size());
#pragma omp parallel
    {
        std::vector<double> scratch(g.physical_size());
#pragma omp for schedule(static)
        for (int c = 0; c < f.components(); ++c) {
            auto src = f.component(c);
            std::copy(src.begin(), src.end(), scratch.begin());
            auto dst = out.component(c);
            fftw_execute_dft_r2c(p.forward, scratch.data(),
                                 reinterpret_cast<fftw_complex*>(dst.data()));
            for (auto& v : dst) v *= scale;
        }
    }
    return out;
}

namespace {

// Odd multiplier ξ̃_a packed as a contiguous array for the kernels.
std::vector<double> odd_axis(const FrequencyTable& t, int a) {
    std::vector<double> m(t.xi_odd.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = t.xi_odd[i][static_cast<std::size_t>(a)];
    return m;
}

}  // namespace

SpectralField gradient(const SpectralField& f) {
    if (f.rank() > 1) throw ShapeError("gradient: rank-2 input not supported");
    const Grid& g = f.grid();
    const auto& t = frequencies(g);
    const int N = g.dim();
    SpectralField out(g, f.rank() + 1);
    for (int j = 0; j < N; ++j) {
        const auto kj = odd_axis(t, j);
        for (int i = 0; i < f.components(); ++i)
            kernels::imag_scale_modes_add(f.component(i), kj, 1.0, out.component(i * N + j));
    }
    return out;
}

SpectralField divergence(const SpectralField& v) {
    if (v.rank() < 1) throw ShapeError("divergence: input must be a vector or tensor");
    const Grid& g = v.grid();
    const auto& t = frequencies(g);
    const int N = g.dim();
    SpectralField out(g, v.rank() - 1);
    for (int j = 0; j < N; ++j) {
        const auto kj = odd_axis(t, j);
        for (int i = 0; i < out.components(); ++i)
            kernels::imag_scale_modes_add(v.component(i * N + j), kj, 1.0, out.component(i));
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    const auto& t = frequencies(f.grid());
    SpectralField out(f.grid(), f.rank());
    for (int c = 0; c < f.components(); ++c)
        kernels::scale_modes_add(f.component(c), t.xi_norm2, -1.0, out.component(c));
    return out;
}

SpectralField inverse_laplacian(const SpectralField& f) {
    const auto& t = frequencies(f.grid());
    std::vector<double> mult(t.xi_norm2.size());
    for (std::size_t i = 0; i < mult.size(); ++i)
        mult[i] = t.xi_norm2[i] > 0.0 ? -1.0 / t.xi_norm2[i] : 0.0;
    return apply_multiplier(f, mult);
}

SpectralField leray_project(const SpectralField& v) {
    if (v.rank() != 1) throw ShapeError("leray_project: input must be a vector field");
    const Grid& g = v.grid();
    const auto& t = frequencies(g);
    const int N = g.dim();
    SpectralField out(g, 1);
    const auto n = static_cast<index_t>(g.spectral_size());
#pragma omp parallel for schedule(static)
    for (index_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto& k = t.xi_odd[i];
        double k2 = 0.0;
        cplx kv = 0.0;
        for (int a = 0; a < N; ++a) {
            k2 += k[a] * k[a];
            kv += k[a] * v.component(a)[i];
        }
        if (t.xi_norm2[i] == 0.0) {
            for (int a = 0; a < N; ++a) out.component(a)[i] = 0.0;
        } else if (k2 == 0.0) {
            for (int a = 0; a < N; ++a) out.component(a)[i] = v.component(a)[i];
        } else {
            for (int a = 0; a < N; ++a) out.component(a)[i] = v.component(a)[i] - k[a] * kv / k2;
        }
    }
    return out;
}

SpectralField dealias(const SpectralField& f) {
    return apply_multiplier(f, frequencies(f.grid()).dealias_mask);
}

SpectralField apply_multiplier(const SpectralField& f, std::span<const double> mult) {
    if (mult.size() != f.grid().spectral_size())
        throw ShapeError("apply_multiplier: multiplier size mismatch");
    SpectralField out(f.grid(), f.rank());
    for (int c = 0; c < f.components(); ++c)
        kernels::scale_modes(f.component(c), mult, out.component(c));
    return out;
}

SpectralField dealiased_product(const PhysicalField& a, const PhysicalField& b) {
    require_same_shape(a.grid(), a.rank(), b.grid(), b.rank(), "dealiased_product");
    if (a.rank() != 0) throw ShapeError("dealiased_product: scalar inputs expected");
    PhysicalField prod(a.grid(), 0);
    kernels::multiply_add(a.data(), b.data(), 1.0, prod.data());
    return dealias(to_spectral(prod));
}

SpectralField outer_square(const SpectralField& u) {
    if (u.rank() != 1) throw ShapeError("outer_square: vector field expected");
    const Grid& g = u.grid();
    const int N = g.dim();
    const PhysicalField up = to_physical(u);
    PhysicalField prod(g, 2);
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            kernels::multiply_add(up.component(i), up.component(j), 1.0, prod.entry(i, j));
            if (j != i) std::ranges::copy(prod.entry(i, j), prod.entry(j, i).begin());
        }
    return dealias(to_spectral(prod));
}

SpectralField gradient_gram(const SpectralField& tau) {
    if (tau.rank() != 1) throw ShapeError("gradient_gram: vector field expected");
    const Grid& g = tau.grid();
    const int N = g.dim();
    const PhysicalField grad = to_physical(gradient(tau));  // entry (k, j) = ∂_j τ_k
    PhysicalField gram(g, 2);
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            for (int k = 0; k < N; ++k)
                kernels::multiply_add(grad.entry(k, i), grad.entry(k, j), 1.0, gram.entry(i, j));
            if (j != i) std::ranges::copy(gram.entry(i, j), gram.entry(j, i).begin());
        }
    return dealias(to_spectral(gram));
}

SpectralField recover_pressure(const SpectralField& u, const SpectralField& tau) {
    require_same_shape(u.grid(), u.rank(), tau.grid(), tau.rank(), "recover_pressure");
    const Grid& g = u.grid();
    const auto& t = frequencies(g);
    const int N = g.dim();
    SpectralField stress = outer_square(u);
    stress += gradient_gram(tau);
    SpectralField p(g, 0);
    auto out = p.component(0);
    for (std::size_t m = 0; m < g.spectral_size(); ++m) {
        const auto& k = t.xi_odd[m];
        double k2 = 0.0;
        for (int a = 0; a < N; ++a) k2 += k[a] * k[a];
        if (k2 == 0.0) continue;
        cplx s = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) s += k[i] * k[j] * stress.entry(i, j)[m];
        out[m] = -s / k2;
    }
    return p;
}

SpectralField constant_field(const Grid& grid, int rank, std::span<const double> values) {
    SpectralField f(grid, rank);
    if (values.size() != static_cast<std::size_t>(f.components()))
        throw ShapeError("constant_field: wrong number of values");
    for (int c = 0; c < f.components(); ++c) f.component(c)[0] = values[static_cast<std::size_t>(c)];
    return f;
}

SpectralField stack_components(std::span<const SpectralField> scalars) {
    if (scalars.empty()) throw ShapeError("stack_components: no components");
    const Grid& g = scalars.front().grid();
    if (scalars.size() != static_cast<std::size_t>(g.dim()))
        throw ShapeError("stack_components: need one scalar per dimension");
    SpectralField v(g, 1);
    for (int c = 0; c < g.dim(); ++c) {
        const auto& s = scalars[static_cast<std::size_t>(c)];
        require_same_shape(g, 0, s.grid(), s.rank(), "stack_components");
        std::ranges::copy(s.component(0), v.component(c).begin());
    }
    return v;
}

SpectralField extract_component(const SpectralField& f, int c) {
    SpectralField s(f.grid(), 0);
    std::ranges::copy(f.component(c), s.component(0).begin());
    return s;
}

void remove_mean(SpectralField& f) {
    for (int c = 0; c < f.components(); ++c) f.component(c)[0] = 0.0;
}

}  // namespace blc
