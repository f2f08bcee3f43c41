#include "blc/errors.hpp"
#include "blc/spectral.hpp"

#include "../support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace blc;
using blc::testing::l2;
using blc::testing::max_diff;
using blc::testing::random_field;
using blc::testing::sample;

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(1, 16), ShapeError);
    CHECK_THROWS_AS(Grid(4, 16), ShapeError);
    CHECK_THROWS_AS(Grid(2, 15), ShapeError);
    CHECK_THROWS_AS(Grid(2, 6), ShapeError);
    CHECK_THROWS_AS(Grid(2, 16, -1.0), ShapeError);
    const Grid g(3, 8);
    CHECK(g.physical_size() == 512);
    CHECK(g.spectral_size() == 8 * 8 * 5);
    CHECK(g.dealias_cutoff() == 2);
}

TEST_CASE("mode and spectral_index are inverse") {
    for (int dim : {2, 3}) {
        const Grid g(dim, 8);
        for (std::size_t i = 0; i < g.spectral_size(); ++i) {
            const auto k = g.mode(i);
            CHECK(k[2 - (3 - dim)] >= 0);
            for (int a = 0; a < dim; ++a) {
                CHECK(k[a] > -4);
                CHECK(k[a] <= 4);
            }
            CHECK(g.spectral_index(k) == i);
        }
    }
}

TEST_CASE("constant field has only the k = 0 coefficient") {
    const Grid g(2, 16);
    PhysicalField p(g, 0);
    for (double& v : p.data()) v = 2.5;
    const SpectralField f = to_spectral(p);
    CHECK(f.component(0)[0].real() == doctest::Approx(2.5).epsilon(1e-15));
    for (std::size_t i = 1; i < g.spectral_size(); ++i) CHECK(std::abs(f.component(0)[i]) < 1e-15);
}

TEST_CASE("cos(6 x1) has coefficients 1/2 at k = +-(6, 0)") {
    const Grid g(2, 64);
    const SpectralField f = to_spectral(sample(g, 0, [](int, auto x) { return std::cos(6.0 * x[0]); }));
    CHECK(std::abs(f.coeff(0, {6, 0, 0}) - 0.5) < 1e-15);
    CHECK(std::abs(f.coeff(0, {-6, 0, 0}) - 0.5) < 1e-15);
    int nonzero = 0;
    for (std::size_t i = 0; i < g.spectral_size(); ++i) nonzero += std::abs(f.component(0)[i]) > 1e-14;
    CHECK(nonzero == 2);  // (6,0) and (-6,0) both sit on the stored half
}

TEST_CASE("coeff and set_coeff respect conjugate symmetry") {
    const Grid g(2, 16);
    SpectralField f(g, 0);
    f.set_coeff(0, {3, -2, 0}, {1.0, 2.0});
    CHECK(f.coeff(0, {-3, 2, 0}) == cplx(1.0, -2.0));
    CHECK(f.coeff(0, {3, -2, 0}) == cplx(1.0, 2.0));
    const PhysicalField p = to_physical(f);
    const auto x = p.position(5);
    CHECK(p.component(0)[5] == doctest::Approx(2.0 * (std::cos(3 * x[0] - 2 * x[1]) - 2.0 * std::sin(3 * x[0] - 2 * x[1]))));
}

TEST_CASE("round trip and Parseval on random fields") {
    for (int dim : {2, 3}) {
        const Grid g(dim, dim == 2 ? 32 : 16);
        std::mt19937_64 rng(11);
        std::normal_distribution<double> nd;
        PhysicalField p(g, 1);
        for (double& v : p.data()) v = nd(rng);
        const PhysicalField back = to_physical(to_spectral(p));
        double err = 0.0, norm = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < p.data().size(); ++i) {
            err = std::max(err, std::abs(back.data()[i] - p.data()[i]));
            norm = std::max(norm, std::abs(p.data()[i]));
            sq += p.data()[i] * p.data()[i];
        }
        CHECK(err / norm < 1e-12);
        const double mean_sq = sq / static_cast<double>(g.physical_size());
        const double spec = l2(to_spectral(p));
        CHECK(std::abs(spec * spec - mean_sq) / mean_sq < 1e-12);
    }
}

TEST_CASE("differential operators on single modes") {
    const Grid g(2, 32);
    const SpectralField s = to_spectral(sample(g, 0, [](int, auto x) { return std::sin(x[0]); }));
    const SpectralField grad = gradient(s);
    const SpectralField expect = to_spectral(sample(g, 1, [](int c, auto x) { return c == 0 ? std::cos(x[0]) : 0.0; }));
    CHECK(max_diff(grad, expect) < 1e-15);

    const SpectralField c6 = to_spectral(sample(g, 0, [](int, auto x) { return std::cos(6.0 * x[0]); }));
    SpectralField lap_expect = c6;
    lap_expect *= -36.0;
    CHECK(max_diff(laplacian(c6), lap_expect) < 1e-13);
    CHECK(max_diff(inverse_laplacian(laplacian(c6)), c6) < 1e-15);
}

TEST_CASE("divergence of a rotated gradient vanishes") {
    const Grid g(2, 32);
    const SpectralField psi = random_field(g, 0, 3);
    const SpectralField gp = gradient(psi);
    SpectralField rot(g, 1);
    std::ranges::copy(gp.component(1), rot.component(0).begin());
    std::ranges::copy(gp.component(0), rot.component(1).begin());
    for (auto& v : rot.component(0)) v = -v;
    CHECK(divergence(rot).max_abs() < 1e-12);
}

TEST_CASE("gradient and divergence shapes") {
    const Grid g(3, 8);
    CHECK(gradient(SpectralField(g, 0)).rank() == 1);
    CHECK(gradient(SpectralField(g, 1)).rank() == 2);
    CHECK_THROWS_AS(gradient(SpectralField(g, 2)), ShapeError);
    CHECK(divergence(SpectralField(g, 2)).rank() == 1);
    CHECK_THROWS_AS(divergence(SpectralField(g, 0)), ShapeError);
    CHECK_THROWS_AS(leray_project(SpectralField(g, 0)), ShapeError);
}

TEST_CASE("operators commute with the transform round trip") {
    const Grid g(2, 32);
    const SpectralField f = random_field(g, 0, 5, true);
    const SpectralField rt = to_spectral(to_physical(f));
    CHECK(max_diff(gradient(rt), gradient(f)) < 1e-11);
    CHECK(max_diff(laplacian(rt), laplacian(f)) < 1e-11);
    const SpectralField v = random_field(g, 1, 6, true);
    CHECK(max_diff(divergence(to_spectral(to_physical(v))), divergence(v)) < 1e-11);
}

TEST_CASE("Leray projection") {
    const Grid g(2, 32);
    SUBCASE("hand-computed mode") {
        SpectralField v(g, 1);
        v.set_coeff(0, {1, 1, 0}, 1.0);
        const SpectralField p = leray_project(v);
        CHECK(std::abs(p.coeff(0, {1, 1, 0}) - 0.5) < 1e-15);
        CHECK(std::abs(p.coeff(1, {1, 1, 0}) + 0.5) < 1e-15);
    }
    SUBCASE("gradients are annihilated") {
        SpectralField f = random_field(g, 0, 9);
        CHECK(leray_project(gradient(f)).max_abs() < 1e-12);
    }
    SUBCASE("idempotent, solenoidal output") {
        SpectralField v = random_field(g, 1, 10);
        remove_mean(v);
        const SpectralField p = leray_project(v);
        CHECK(max_diff(leray_project(p), p) < 1e-12);
        CHECK(divergence(p).max_abs() < 1e-12);
    }
    SUBCASE("mean is mapped to zero") {
        const double c[] = {1.0, 2.0};
        CHECK(leray_project(constant_field(g, 1, c)).max_abs() == 0.0);
    }
    SUBCASE("three dimensions") {
        const Grid g3(3, 16);
        SpectralField v = random_field(g3, 1, 12);
        const SpectralField p = leray_project(v);
        CHECK(divergence(p).max_abs() < 1e-12);
        CHECK(max_diff(leray_project(p), p) < 1e-12);
    }
}

TEST_CASE("pressure recovery") {
    const Grid g(2, 32);
    SUBCASE("zero data") {
        CHECK(recover_pressure(SpectralField(g, 1), SpectralField(g, 1)).max_abs() == 0.0);
    }
    SUBCASE("shear flow has no pressure") {
        const SpectralField u = to_spectral(sample(g, 1, [](int c, auto x) { return c == 0 ? std::sin(x[1]) : 0.0; }));
        CHECK(recover_pressure(u, SpectralField(g, 1)).max_abs() < 1e-15);
    }
    SUBCASE("momentum residual") {
        SpectralField u = leray_project(random_field(g, 1, 21, true));
        u *= 0.1;
        SpectralField tau = random_field(g, 1, 22, true);
        tau *= 0.1;
        const SpectralField p = recover_pressure(u, tau);
        CHECK(std::abs(p.component(0)[0]) == 0.0);
        SpectralField stress = outer_square(u);
        stress += gradient_gram(tau);
        SpectralField residual = divergence(stress);
        residual += gradient(p);
        CHECK(divergence(residual).max_abs() < 1e-10);
        CHECK(max_diff(residual, leray_project(divergence(stress))) < 1e-10);
    }
}

TEST_CASE("dealiasing") {
    const Grid g(2, 32);
    SpectralField f(g, 0);
    f.set_coeff(0, {16, 0, 0}, 1.0);
    f.set_coeff(0, {1, 0, 0}, 1.0);
    f.set_coeff(0, {10, -10, 0}, 1.0);
    f.set_coeff(0, {11, 0, 0}, 1.0);
    const SpectralField d = dealias(f);
    CHECK(d.coeff(0, {16, 0, 0}) == cplx(0.0));
    CHECK(d.coeff(0, {11, 0, 0}) == cplx(0.0));
    CHECK(d.coeff(0, {1, 0, 0}) == cplx(1.0));
    CHECK(d.coeff(0, {10, -10, 0}) == cplx(1.0));
    const SpectralField r = random_field(g, 1, 4);
    CHECK(max_diff(dealias(dealias(r)), dealias(r)) == 0.0);
}

TEST_CASE("gradient_gram entries") {
    const Grid g(2, 32);
    // tau = (cos x1, sin x2): grad has d1 tau_0 = -sin x1, d2 tau_1 = cos x2
    const SpectralField tau = to_spectral(sample(g, 1, [](int c, auto x) { return c == 0 ? std::cos(x[0]) : std::sin(x[1]); }));
    const PhysicalField gram = to_physical(gradient_gram(tau));
    for (std::size_t m = 0; m < g.physical_size(); m += 37) {
        const auto x = gram.position(m);
        CHECK(gram.entry(0, 0)[m] == doctest::Approx(std::sin(x[0]) * std::sin(x[0])).epsilon(1e-12));
        CHECK(gram.entry(1, 1)[m] == doctest::Approx(std::cos(x[1]) * std::cos(x[1])).epsilon(1e-12));
        CHECK(std::abs(gram.entry(0, 1)[m]) < 1e-13);
    }
}

TEST_CASE("component helpers and shape checks") {
    const Grid g(3, 8);
    SpectralField a = random_field(g, 0, 1), b = random_field(g, 0, 2), c = random_field(g, 0, 3);
    const SpectralField parts[] = {a, b, c};
    const SpectralField v = stack_components(parts);
    CHECK(max_diff(extract_component(v, 1), b) == 0.0);
    SpectralField w = v;
    remove_mean(w);
    for (int i = 0; i < 3; ++i) CHECK(w.component(i)[0] == cplx(0.0));
    CHECK_THROWS_AS(SpectralField(g, 0) += SpectralField(Grid(3, 16), 0), ShapeError);
    CHECK_THROWS_AS(SpectralField(g, 0) += SpectralField(g, 1), ShapeError);
    CHECK_THROWS_AS(dealiased_product(PhysicalField(g, 1), PhysicalField(g, 1)), ShapeError);
}
