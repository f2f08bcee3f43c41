#include "blc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace blc::kernels {

namespace serial {

void scale_modes(std::span<const cplx> in, std::span<const double> mult, std::span<cplx> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = mult[i] * in[i];
}

void scale_modes_add(std::span<const cplx> in, std::span<const double> mult, double s,
                     std::span<cplx> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] += (s * mult[i]) * in[i];
}

void imag_scale_modes_add(std::span<const cplx> in, std::span<const double> mult, double s,
                          std::span<cplx> out) {
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double m = s * mult[i];
        out[i] += cplx(-m * in[i].imag(), m * in[i].real());
    }
}

void multiply_add(std::span<const double> a, std::span<const double> b, double s,
                  std::span<double> out) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += s * a[i] * b[i];
}

double weighted_norm2(std::span<const cplx> c, std::span<const double> weight,
                      std::span<const double> mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double m = mask.empty() ? 1.0 : mask[i];
        sum += weight[i] * m * m * std::norm(c[i]);
    }
    return sum;
}

double power_sum(std::span<const double> x, double p) {
    double sum = 0.0;
    for (double v : x) sum += std::pow(std::abs(v), p);
    return sum;
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

void pointwise_norm(std::span<const double> comps, int ncomp, std::span<double> out) {
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < ncomp; ++c) {
            const double v = comps[static_cast<std::size_t>(c) * n + i];
            s += v * v;
        }
        out[i] = std::sqrt(s);
    }
}

}  // namespace serial

namespace omp {

namespace {

using index_t = std::ptrdiff_t;

index_t ssize_of(std::size_t n) { return static_cast<index_t>(n); }

// Ordered two-level reduction: chunk partials in parallel, then summed in order.
template <typename ChunkFn>
double chunked_sum(std::size_t n, ChunkFn&& chunk) {
    const std::size_t nchunks = (n + reduction_chunk - 1) / reduction_chunk;
    std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
    for (index_t c = 0; c < ssize_of(nchunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * reduction_chunk;
        const std::size_t hi = std::min(n, lo + reduction_chunk);
        partial[static_cast<std::size_t>(c)] = chunk(lo, hi);
    }
    double sum = 0.0;
    for (double v : partial) sum += v;
    return sum;
}

}  // namespace

void scale_modes(std::span<const cplx> in, std::span<const double> mult, std::span<cplx> out) {
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < ssize_of(in.size()); ++i) out[i] = mult[i] * in[i];
}

void scale_modes_add(std::span<const cplx> in, std::span<const double> mult, double s,
                     std::span<cplx> out) {
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < ssize_of(in.size()); ++i) out[i] += (s * mult[i]) * in[i];
}

void imag_scale_modes_add(std::span<const cplx> in, std::span<const double> mult, double s,
                          std::span<cplx> out) {
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < ssize_of(in.size()); ++i) {
        const double m = s * mult[i];
        out[i] += cplx(-m * in[i].imag(), m * in[i].real());
    }
}

void multiply_add(std::span<const double> a, std::span<const double> b, double s,
                  std::span<double> out) {
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < ssize_of(a.size()); ++i) out[i] += s * a[i] * b[i];
}

double weighted_norm2(std::span<const cplx> c, std::span<const double> weight,
                      std::span<const double> mask) {
    return chunked_sum(c.size(), [&](std::size_t lo, std::size_t hi) {
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double m = mask.empty() ? 1.0 : mask[i];
            sum += weight[i] * m * m * std::norm(c[i]);
        }
        return sum;
    });
}

double power_sum(std::span<const double> x, double p) {
    return chunked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
        double sum = 0.0;
        if (p == 2.0) {
            for (std::size_t i = lo; i < hi; ++i) sum += x[i] * x[i];
        } else {
            for (std::size_t i = lo; i < hi; ++i) sum += std::pow(std::abs(x[i]), p);
        }
        return sum;
    });
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (index_t i = 0; i < ssize_of(x.size()); ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

void pointwise_norm(std::span<const double> comps, int ncomp, std::span<double> out) {
    const std::size_t n = out.size();
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < ssize_of(n); ++i) {
        double s = 0.0;
        for (int c = 0; c < ncomp; ++c) {
            const double v = comps[static_cast<std::size_t>(c) * n + static_cast<std::size_t>(i)];
            s += v * v;
        }
        out[i] = std::sqrt(s);
    }
}

}  // namespace omp

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void configure_threads_from_env() {
    const char* env = std::getenv("BLC_THREADS");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || n < 1) return;
#ifdef _OPENMP
    omp_set_num_threads(static_cast<int>(std::min<long>(n, omp_get_max_threads())));
#endif
}

}  // namespace blc::kernels
