#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "fpme/core.hpp"

using namespace fpme;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// 50-digit gamma ratio, independent of the library's double-precision path.
double mu_reference(double sigma) {
    const Big s(sigma);
    const Big v = boost::multiprecision::pow(Big(2), s - 1) * boost::multiprecision::tgamma(s / 2) /
                  boost::multiprecision::tgamma(1 - s / 2);
    return static_cast<double>(v);
}

double riesz_reference(int N, double sigma) {
    const Big s(sigma);
    const Big pi = boost::math::constants::pi<Big>();
    const Big v = boost::multiprecision::pow(Big(2), s - 1) * s * boost::multiprecision::tgamma((N + s) / 2) /
                  (boost::multiprecision::pow(pi, Big(N) / 2) * boost::multiprecision::tgamma(1 - s / 2));
    return static_cast<double>(v);
}

}  // namespace

TEST_CASE("mu_sigma against an arbitrary-precision gamma") {
    CHECK(mu_sigma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mu_sigma(0.5) == doctest::Approx(2.0921).epsilon(5e-5));
    for (double s : {0.05, 0.3, 0.5, 0.75, 1.0, 1.25, 1.5, 1.9, 1.99}) {
        CAPTURE(s);
        CHECK(std::abs(mu_sigma(s) / mu_reference(s) - 1.0) < 1e-12);
    }
}

TEST_CASE("nu_sigma is sigma times mu_sigma on a 50-point sweep") {
    for (int n = 0; n < 50; ++n) {
        const double s = 0.02 + n * (1.96 / 49.0);
        CAPTURE(s);
        const double mu = mu_sigma(s);
        CHECK(nu_sigma(s) == s * mu);
        CHECK(std::isfinite(mu));
        CHECK(mu > 0.0);
        CHECK(nu_sigma(s) > 0.0);
    }
    CHECK_THROWS_AS(mu_sigma(0.0), DomainError);
    CHECK_THROWS_AS(mu_sigma(2.0), DomainError);
}

TEST_CASE("riesz_constant") {
    CHECK(riesz_constant(1, 1.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(riesz_constant(2, 1.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
    for (double s : {0.3, 0.8, 1.4, 1.9}) {
        for (int N : {1, 2, 3}) {
            CAPTURE(s);
            CAPTURE(N);
            CHECK(std::abs(riesz_constant(N, s) / riesz_reference(N, s) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("cfl_max_dt examples") {
    const double h = 0.01;
    CHECK(cfl_max_dt(1.0, 3.7, 1.0, h) == doctest::Approx(h).epsilon(1e-14));
    CHECK(cfl_max_dt(2.0, 4.0, 1.0, h) == doctest::Approx(h / 8.0).epsilon(1e-14));
    CHECK(cfl_max_dt(1.0, 1.0, 0.5, 0.01) == doctest::Approx(0.1 / (0.5 * mu_reference(0.5))).epsilon(1e-12));
    CHECK(std::isinf(cfl_max_dt(2.0, 0.0, 1.0, h)));
    // Small data: the update slope m u^(m-1) with u = b_max^(1/m) = 0.5 gives 1, so dt = h.
    CHECK(cfl_max_dt(2.0, 0.25, 1.0, h) == doctest::Approx(h).epsilon(1e-14));
}

TEST_CASE("cfl_max_dt keeps the trace update convex") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const double m = 1.0 + 3.0 * u(rng);
        const double s = 0.05 + 1.9 * u(rng);
        const double b = 0.01 + 4.0 * u(rng);
        const double dx = 1e-3 + 0.5 * u(rng);
        const double lambda = nu_sigma(s) * cfl_max_dt(m, b, s, dx) / std::pow(dx, s);
        // Largest derivative of u -> u^m on [0, b^(1/m)].
        CHECK(lambda * m * std::pow(b, (m - 1.0) / m) <= 1.0 + 1e-12);
    }
}

TEST_CASE("cfl_max_dt monotonicity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const double m = 1.0 + 3.0 * u(rng);
        const double s = 0.05 + 1.9 * u(rng);
        const double b = 0.1 + 5.0 * u(rng);
        const double dx = 1e-3 + 0.5 * u(rng);
        CHECK(cfl_max_dt(m, b, s, 1.5 * dx) > cfl_max_dt(m, b, s, dx));
        const double m2 = 1.1 + 3.0 * u(rng);
        CHECK(cfl_max_dt(m2, 1.5 * b, s, dx) < cfl_max_dt(m2, b, s, dx));
    }
}

TEST_CASE("effective_order rows") {
    CHECK(effective_order(0.25, 4, 4).value == doctest::Approx(3.75));
    CHECK(effective_order(0.25, 4, 4).value >= 2.0 * (2.0 - 0.25));
    CHECK(effective_order(1.5, 3, 4).value == doctest::Approx(2.5));
    CHECK(effective_order(1.0, 2, 1).value == doctest::Approx(2.0));
    CHECK(effective_order(1.0, 2, 7).value == doctest::Approx(2.0));
    // Optimal: (3,4) on (1/2,1) reaches 2(2-sigma).
    CHECK(effective_order(0.75, 3, 4).value >= 2.0 * (2.0 - 0.75));
    // Minimal: the sixth-section pairs reach sigma, the minimal requirement.
    CHECK(effective_order(0.25, 1, 1).value > 0.25);
    CHECK(effective_order(0.75, 1, 2).value > 0.75);
    CHECK(effective_order(1.25, 2, 3).value > 1.25);
    CHECK(effective_order(1.75, 3, 4).value > 1.75);
    const auto bad = effective_order(1.5, 2, 1);
    CHECK(bad.value == doctest::Approx(-0.5));
    CHECK_FALSE(bad.valid);
}

TEST_CASE("grid regions partition the nodes") {
    for (auto [I, K] : {std::pair{4, 2}, {8, 5}, {16, 16}, {10, 3}}) {
        const double dx = 0.25;
        const Grid grid(I, K, 0.5 * I * dx, K * dx);
        int trace = 0, lateral = 0, interior = 0;
        for (int k = 0; k <= K; ++k) {
            for (int i = 0; i <= I; ++i) {
                switch (grid.region(i, k)) {
                    case Region::TraceBoundary: ++trace; break;
                    case Region::LateralBoundary: ++lateral; break;
                    case Region::Interior: ++interior; break;
                }
            }
        }
        CHECK(trace + lateral + interior == (I + 1) * (K + 1));
        CHECK(trace == I - 1);
        CHECK(lateral == 2 * (K + 1) + (I - 1));
        CHECK(static_cast<std::size_t>(interior) == grid.interior_count());
        const auto nodes = grid.lateral_nodes();
        CHECK(nodes.size() == static_cast<std::size_t>(lateral));
        std::set<std::size_t> distinct;
        for (const auto& n : nodes) {
            CHECK(grid.region(n.i, n.k) == Region::LateralBoundary);
            distinct.insert(grid.index(n.i, n.k));
        }
        CHECK(distinct.size() == nodes.size());
    }
}

TEST_CASE("mesh must be isotropic") {
    CHECK_THROWS_AS(Grid(8, 4, 1.0, 2.0), ConfigError);
    SolverConfig c;
    c.half_width = 1.0;
    c.height = 1.0;
    c.I = 8;
    c.K = 4;
    CHECK_NOTHROW(c.validate());
    c.K = 5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.K = 4;
    c.m = 0.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("m-th root and power") {
    CHECK(root_m(0.0, 3.0) == 0.0);
    CHECK(power_m(0.0, 2.5) == 0.0);
    CHECK(root_m(0.37, 1.0) == 0.37);
    CHECK(root_m(8.0, 3.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(power_m(2.0, 3.0) == doctest::Approx(8.0).epsilon(1e-14));
    const std::vector<double> f{9.0, 1.0, 2.0, 0.5, 9.0};
    // Corners excluded from b_max.
    CHECK(trace_b_max(f, 2.0) == doctest::Approx(4.0));
}

TEST_CASE("field extrema") {
    const Grid grid(4, 2, 1.0, 1.0);
    Field f(grid);
    f(2, 1) = 3.0;
    f(1, 0) = -1.0;
    CHECK(f.max() == 3.0);
    CHECK(f.min() == -1.0);
    CHECK(f.row(1)[2] == 3.0);
}
