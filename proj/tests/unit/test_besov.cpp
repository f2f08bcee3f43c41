#include "blc/besov.hpp"
#include "blc/errors.hpp"
#include "blc/spectral.hpp"

#include "../support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace blc;
using blc::testing::random_field;
using blc::testing::sample;

TEST_CASE("discrete Lebesgue norms") {
    const Grid g(2, 32);
    PhysicalField two(g, 0);
    for (double& v : two.data()) v = 2.0;
    for (double p : {1.0, 2.0, 3.5, inf}) CHECK(lp_norm(two, p) == doctest::Approx(2.0).epsilon(1e-14));
    const PhysicalField c = sample(g, 0, [](int, auto x) { return std::cos(x[0]); });
    CHECK(lp_norm(c, 2.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(lp_norm(c, inf) == 1.0);
    PhysicalField scaled = c;
    for (double& v : scaled.data()) v *= -3.0;
    CHECK(lp_norm(scaled, 3.0) == doctest::Approx(3.0 * lp_norm(c, 3.0)).epsilon(1e-14));
    PhysicalField bad = c;
    bad.data()[7] = std::nan("");
    CHECK_THROWS_AS(lp_norm(bad, 2.0), BlowupError);
    CHECK_THROWS_AS(lp_norm(c, 0.5), PreconditionError);
}

TEST_CASE("vector fields use the pointwise Euclidean norm") {
    const Grid g(2, 16);
    const PhysicalField v = sample(g, 1, [](int c, auto) { return c == 0 ? 3.0 : 4.0; });
    CHECK(lp_norm(v, inf) == doctest::Approx(5.0));
    CHECK(lp_norm(v, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("Besov norm of a single block") {
    const Grid g(2, 64);
    const DyadicPartition P(g);
    const SpectralField u = to_spectral(sample(g, 0, [](int, auto x) { return std::cos(6.0 * x[0]); }));
    for (double s : {-1.0, 0.0, 0.5, 1.0})
        CHECK(besov_norm(u, {s, 2.0, 1.0}, P) == doctest::Approx(std::exp2(2.0 * s) / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(besov_norm(u, {1.0, inf, inf}, P) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(besov_norm(SpectralField(g, 0), {0.0, 2.0, 1.0}, P) == 0.0);
}

TEST_CASE("p = 2 block norms agree with physical quadrature") {
    const Grid g(2, 32);
    const DyadicPartition P(g);
    const SpectralField u = random_field(g, 1, 3);
    const auto fast = block_lp_norms(u, P, 2.0);
    for (int q = P.q_min(); q <= P.q_max(); ++q)
        CHECK(fast[q - P.q_min()] ==
              doctest::Approx(lp_norm(to_physical(block_project(u, q, P)), 2.0)).epsilon(1e-12));
}

TEST_CASE("embedding, monotonicity and homogeneity") {
    const Grid g(2, 64);
    const DyadicPartition P(g);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const SpectralField u = random_field(g, 0, seed);
        const double n1 = besov_norm(u, {0.5, 2.0, 1.0}, P);
        const double n2 = besov_norm(u, {0.5, 2.0, 2.0}, P);
        const double ni = besov_norm(u, {0.5, 2.0, inf}, P);
        CHECK(ni <= n2);
        CHECK(n2 <= n1);
        SpectralField v = u;
        v *= -2.5;
        CHECK(besov_norm(v, {0.5, 3.0, 1.0}, P) == doctest::Approx(2.5 * besov_norm(u, {0.5, 3.0, 1.0}, P)).epsilon(1e-13));
    }
}

TEST_CASE("dyadic shift leaves the critical velocity norm unchanged") {
    const Grid g(2, 64);
    const DyadicPartition P(g);
    SpectralField u(g, 0), shifted(g, 0);
    const std::array<int, 3> modes[] = {{1, 2, 0}, {-3, 1, 0}, {2, 2, 0}};
    for (const auto& k : modes) {
        u.set_coeff(0, k, {0.7, -0.2});
        shifted.set_coeff(0, {2 * k[0], 2 * k[1], 0}, {0.7, -0.2});
    }
    CHECK(besov_norm(shifted, {0.0, 2.0, 1.0}, P) == doctest::Approx(besov_norm(u, {0.0, 2.0, 1.0}, P)).epsilon(1e-14));
}

TEST_CASE("time grids") {
    CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 1.0}), PreconditionError);
    const TimeGrid t = TimeGrid::uniform(0.0, 2.0, 5);
    CHECK(t.size() == 5);
    CHECK(t.samples()[1] == 0.5);
    CHECK(t.back() == 2.0);
    CHECK_THROWS_AS(TimeGrid::uniform(0.0, 1.0, 1), PreconditionError);
    const double v[] = {3.0};
    CHECK(time_lp(v, TimeGrid({0.5}), 2.0) == 0.0);
    CHECK(time_lp(v, TimeGrid({0.5}), inf) == 3.0);
    CHECK_THROWS_AS(time_lp({}, TimeGrid(), 2.0), PreconditionError);
}

namespace {

BlockNormSeries constant_series(const TimeGrid& t, std::span<const double> blocks, int q_min) {
    BlockNormSeries s(q_min, static_cast<int>(blocks.size()), 2.0);
    for (double ti : t.samples()) s.append(ti, blocks);
    return s;
}

}  // namespace

TEST_CASE("Chemin-Lerner norms of simple series") {
    const double blocks[] = {0.5, 2.0, 1.0};
    const TimeGrid t = TimeGrid::uniform(0.0, 3.0, 31);
    const BlockNormSeries s = constant_series(t, blocks, -1);
    const double besov = contract_blocks(blocks, -1, 0.5, 1.0);
    const CheminLernerIndex idx{4.0, {0.5, 2.0, 1.0}};
    CHECK(chemin_lerner_norm(s, idx, t) == doctest::Approx(std::pow(3.0, 0.25) * besov).epsilon(1e-13));
    CHECK(lebesgue_besov_norm(s, idx, t) == doctest::Approx(std::pow(3.0, 0.25) * besov).epsilon(1e-13));
    CHECK(chemin_lerner_norm(s, {inf, {0.5, 2.0, 1.0}}, t) == doctest::Approx(besov).epsilon(1e-14));

    const CheminLernerIndex same{2.0, {1.0, 2.0, 2.0}};
    CHECK(chemin_lerner_norm(s, same, t) == doctest::Approx(lebesgue_besov_norm(s, same, t)).epsilon(1e-14));
    CHECK_THROWS_AS(chemin_lerner_norm(s, {0.5, {0.0, 2.0, 1.0}}, t), PreconditionError);
    CHECK_THROWS_AS(chemin_lerner_norm(s, idx, TimeGrid::uniform(0.0, 3.0, 30)), ShapeError);
}

TEST_CASE("series bookkeeping") {
    BlockNormSeries s(-1, 2, 2.0);
    const double a[] = {1.0, 2.0}, b[] = {3.0, 4.0};
    s.append(0.0, a);
    s.append(0.5, b);
    CHECK(s.at(0, 1) == 4.0);
    CHECK(s.truncated(0.25).size() == 1);
    CHECK_THROWS_AS(s.append(0.5, a), PreconditionError);
    const double c[] = {1.0};
    CHECK_THROWS_AS(s.append(1.0, c), ShapeError);
}

TEST_CASE("trapezoid quadrature converges at second order") {
    const auto error = [](std::size_t K) {
        BlockNormSeries s(0, 1, 2.0);
        const TimeGrid t = TimeGrid::uniform(0.0, 1.0, K);
        for (double ti : t.samples()) {
            const double v[] = {std::exp(-ti)};
            s.append(ti, v);
        }
        return std::abs(chemin_lerner_norm(s, {2.0, {0.0, 2.0, 1.0}}, t) - std::sqrt((1.0 - std::exp(-2.0)) / 2.0));
    };
    const double e1 = error(51), e2 = error(101), e3 = error(201);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Minkowski ordering with crossing block dominance") {
    // block 0 dominates early, block 1 late
    const TimeGrid t = TimeGrid::uniform(0.0, 1.0, 201);
    BlockNormSeries s(0, 2, 2.0);
    for (double ti : t.samples()) {
        const double v[] = {1.0 - ti, ti};
        s.append(ti, v);
    }
    const auto lo = minkowski_compare(s, {inf, {0.0, 2.0, 1.0}}, t);
    CHECK(lo.expected_order == 1);
    CHECK(lo.chemin_lerner > lo.lebesgue * (1 + 1e-3));
    const auto hi = minkowski_compare(s, {1.0, {0.0, 2.0, inf}}, t);
    CHECK(hi.expected_order == -1);
    CHECK(hi.chemin_lerner < hi.lebesgue * (1 - 1e-3));
    const auto eq = minkowski_compare(s, {2.0, {0.0, 2.0, 2.0}}, t);
    CHECK(eq.expected_order == 0);
    CHECK(std::abs(eq.chemin_lerner - eq.lebesgue) <= 1e-12 * eq.lebesgue);
}

TEST_CASE("norm series export") {
    const TimeGrid t = TimeGrid::uniform(0.0, 1.0, 3);
    const double blocks[] = {1.0, 1.0};
    const BlockNormSeries s = constant_series(t, blocks, 0);
    const NamedSeries named[] = {{"u", &s, {1.0, 2.0, 1.0}}};
    std::ostringstream out;
    write_norm_series_csv(out, named);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "time,norm_name,value,q_min,q_max");
    std::getline(in, line);
    CHECK(line == "0,u,3,0,1");
}
