#pragma once

#include "blc/grid.hpp"

#include <span>
#include <vector>

namespace blc {

/// 0 = scalar, 1 = vector with N components, 2 = N×N tensor (row-major).
int component_count(int dim, int rank);

namespace detail {

template <typename T>
class FieldStorage {
public:
    FieldStorage(const Grid& grid, int rank, std::size_t per_component)
        : grid_(grid), rank_(rank), ncomp_(component_count(grid.dim(), rank)),
          per_component_(per_component), data_(per_component * ncomp_) {}

    const Grid& grid() const noexcept { return grid_; }
    int rank() const noexcept { return rank_; }
    int components() const noexcept { return ncomp_; }
    std::size_t component_size() const noexcept { return per_component_; }

    std::span<T> component(int c) {
        return {data_.data() + per_component_ * static_cast<std::size_t>(c), per_component_};
    }
    std::span<const T> component(int c) const {
        return {data_.data() + per_component_ * static_cast<std::size_t>(c), per_component_};
    }
    /// Tensor entry (i, j) of a rank-2 field.
    std::span<T> entry(int i, int j) { return component(i * grid_.dim() + j); }
    std::span<const T> entry(int i, int j) const { return component(i * grid_.dim() + j); }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

private:
    Grid grid_;
    int rank_;
    int ncomp_;
    std::size_t per_component_;
    std::vector<T> data_;
};

}  // namespace detail

/// Fourier-series amplitudes of a real field, half-spectrum layout (see Grid).
class SpectralField : public detail::FieldStorage<cplx> {
public:
    SpectralField(const Grid& grid, int rank)
        : FieldStorage(grid, rank, grid.spectral_size()) {}

    /// Coefficient of component c at integer wave vector k (any sign); the
    /// conjugate partner is returned when k lies in the unstored half.
    cplx coeff(int c, std::array<int, 3> k) const;
    void set_coeff(int c, std::array<int, 3> k, cplx value);

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s);
    /// this += s * other
    SpectralField& axpy(double s, const SpectralField& other);

    /// Largest coefficient modulus over all components.
    double max_abs() const;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Real samples on the collocation grid.
class PhysicalField : public detail::FieldStorage<double> {
public:
    PhysicalField(const Grid& grid, int rank)
        : FieldStorage(grid, rank, grid.physical_size()) {}

    /// Coordinates of flat sample index `idx`.
    std::array<double, 3> position(std::size_t idx) const;

    bool all_finite() const;
    double max_abs() const;
};

/// Throws ShapeError unless both fields live on the same grid with the same rank.
void require_same_shape(const Grid& a, int rank_a, const Grid& b, int rank_b, const char* where);

}  // namespace blc
