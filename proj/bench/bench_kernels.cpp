// Serial vs OpenMP kernels on spectral-sized arrays, plus one right-hand-side
// evaluation. Usage: bench_kernels [M] [repeats]

#include "blc/kernels.hpp"
#include "blc/solver.hpp"
#include "blc/spectral.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

namespace {

template <typename F>
double seconds_per_call(F&& f, int repeats) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s serial %10.3e s   omp %10.3e s   speedup %5.2f\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
    namespace K = blc::kernels;
    K::configure_threads_from_env();
    const int M = argc > 1 ? std::atoi(argv[1]) : 256;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 50;
    const blc::Grid g(2, M);
    const std::size_t n = g.spectral_size();
    std::printf("grid %dx%d, %zu modes, %d threads\n", M, M, n, K::thread_count());

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::vector<blc::cplx> a(n), out(n);
    std::vector<double> mult(n), x(g.physical_size()), y(g.physical_size()), z(g.physical_size());
    for (auto& v : a) v = {nd(rng), nd(rng)};
    for (auto& v : mult) v = nd(rng);
    for (auto& v : x) v = nd(rng);
    for (auto& v : y) v = nd(rng);
    const auto& w = blc::frequencies(g).weight;

    report("scale_modes", seconds_per_call([&] { K::serial::scale_modes(a, mult, out); }, repeats),
           seconds_per_call([&] { K::omp::scale_modes(a, mult, out); }, repeats));
    report("imag_scale_modes_add", seconds_per_call([&] { K::serial::imag_scale_modes_add(a, mult, 0.5, out); }, repeats),
           seconds_per_call([&] { K::omp::imag_scale_modes_add(a, mult, 0.5, out); }, repeats));
    report("multiply_add", seconds_per_call([&] { K::serial::multiply_add(x, y, 1.0, z); }, repeats),
           seconds_per_call([&] { K::omp::multiply_add(x, y, 1.0, z); }, repeats));
    volatile double sink = 0.0;
    report("weighted_norm2", seconds_per_call([&] { sink = K::serial::weighted_norm2(a, w, mult); }, repeats),
           seconds_per_call([&] { sink = K::omp::weighted_norm2(a, w, mult); }, repeats));
    report("power_sum(p=3)", seconds_per_call([&] { sink = K::serial::power_sum(x, 3.0); }, repeats),
           seconds_per_call([&] { sink = K::omp::power_sum(x, 3.0); }, repeats));
    report("max_abs", seconds_per_call([&] { sink = K::serial::max_abs(x); }, repeats),
           seconds_per_call([&] { sink = K::omp::max_abs(x); }, repeats));

    blc::State s{blc::SpectralField(g, 1), blc::SpectralField(g, 1), 0.0, {1.0, 0.0, 0.0}};
    for (int c = 0; c < 2; ++c)
        for (int k = 1; k < 6; ++k) {
            s.u.set_coeff(c, {k, 2 * k - 3, 0}, {1e-3 / k, 0.0});
            s.tau.set_coeff(c, {3 - k, k, 0}, {0.0, 1e-3 / k});
        }
    s.u = blc::leray_project(s.u);
    (void)blc::nonlinear_terms(s);  // plans the transforms
    const double rhs = seconds_per_call([&] { (void)blc::nonlinear_terms(s); }, std::max(1, repeats / 5));
    std::printf("%-22s %10.3e s per evaluation\n", "nonlinear_terms", rhs);
    return 0;
}
