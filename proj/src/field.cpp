#include "blc/field.hpp"

#include "blc/errors.hpp"
#include "blc/kernels.hpp"

#include <cmath>
#include <string>

namespace blc {

int component_count(int dim, int rank) {
    switch (rank) {
    case 0: return 1;
    case 1: return dim;
    case 2: return dim * dim;
    default: throw ShapeError("field rank must be 0, 1 or 2, got " + std::to_string(rank));
    }
}

void require_same_shape(const Grid& a, int rank_a, const Grid& b, int rank_b, const char* where) {
    if (!(a == b)) throw ShapeError(std::string(where) + ": grid mismatch");
    if (rank_a != rank_b) throw ShapeError(std::string(where) + ": rank mismatch");
}

namespace {

// Folds each axis into (-M/2, M/2].
std::array<int, 3> fold(const Grid& g, std::array<int, 3> k) {
    const int M = g.points();
    for (int a = 0; a < g.dim(); ++a) {
        int v = ((k[a] % M) + M) % M;
        if (v > M / 2) v -= M;
        k[a] = v;
    }
    return k;
}

}  // namespace

cplx SpectralField::coeff(int c, std::array<int, 3> k) const {
    const Grid& g = grid();
    k = fold(g, k);
    const int last = g.dim() - 1;
    if (k[last] < 0) {
        for (int a = 0; a < g.dim(); ++a) k[a] = -k[a];
        k = fold(g, k);
        return std::conj(component(c)[g.spectral_index(k)]);
    }
    return component(c)[g.spectral_index(k)];
}

void SpectralField::set_coeff(int c, std::array<int, 3> k, cplx value) {
    const Grid& g = grid();
    k = fold(g, k);
    const int last = g.dim() - 1;
    if (k[last] < 0) {
        for (int a = 0; a < g.dim(); ++a) k[a] = -k[a];
        k = fold(g, k);
        value = std::conj(value);
    }
    component(c)[g.spectral_index(k)] = value;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    return axpy(1.0, other);
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    return axpy(-1.0, other);
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& v : data()) v *= s;
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
    require_same_shape(grid(), rank(), other.grid(), other.rank(), "SpectralField::axpy");
    auto dst = data();
    auto src = other.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * src[i];
    return *this;
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (const auto& v : data()) m = std::max(m, std::abs(v));
    return m;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

std::array<double, 3> PhysicalField::position(std::size_t idx) const {
    const Grid& g = grid();
    const auto M = static_cast<std::size_t>(g.points());
    const double h = g.period() / static_cast<double>(g.points());
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = g.dim() - 1; a >= 0; --a) {
        x[static_cast<std::size_t>(a)] = h * static_cast<double>(idx % M);
        idx /= M;
    }
    return x;
}

bool PhysicalField::all_finite() const {
    for (double v : data())
        if (!std::isfinite(v)) return false;
    return true;
}

double PhysicalField::max_abs() const { return kernels::max_abs(data()); }

}  // namespace blc
