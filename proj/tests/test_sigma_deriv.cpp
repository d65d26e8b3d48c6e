#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "fpme/core.hpp"
#include "fpme/harness.hpp"
#include "fpme/quadrature.hpp"
#include "fpme/sigma_deriv.hpp"

using namespace fpme;

namespace {

std::string four(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// (-Delta)^(sigma/2) exp(-x^2) at x = 0 from the Fourier side:
// (1/pi) int_0^inf xi^sigma sqrt(pi) exp(-xi^2/4) dxi = 2^sigma Gamma((sigma+1)/2) / sqrt(pi).
double gaussian_frac_laplacian_at_zero(double sigma) {
    return std::pow(2.0, sigma) * std::tgamma(0.5 * (sigma + 1.0)) / std::sqrt(std::numbers::pi);
}

}  // namespace

TEST_CASE("two-point quotient examples") {
    CHECK(four(discrete_sigma_derivative(1.0, std::exp(0.25), 0.5, 1.0)) == "0.5681");
    CHECK(four(discrete_sigma_derivative(1.0, std::exp(0.25), 0.5, 1.5)) == "1.2050");
    for (double s : {0.3, 1.0, 1.7}) {
        CHECK(discrete_sigma_derivative(2.5, 2.5, 0.1, s) == 0.0);
        CHECK(normalized_sigma_derivative(2.5, 2.5, 0.1, s) == 0.0);
    }
    CHECK(normalized_sigma_derivative(0.3, 0.7, 0.2, 1.0) == discrete_sigma_derivative(0.3, 0.7, 0.2, 1.0));
    CHECK_THROWS_AS(discrete_sigma_derivative(1.0, 1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(discrete_sigma_derivative(1.0, NAN, 0.1, 1.0), DomainError);
}

TEST_CASE("two-point quotient is linear and sign preserving") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        const double s = 0.05 + 0.95 * (u(rng) + 2.0) / 2.0;
        const double y = 0.01 + (u(rng) + 2.0) / 4.0;
        const double a = u(rng), b = u(rng);
        const double v0 = u(rng), vy = u(rng), w0 = u(rng), wy = u(rng);
        const double lhs = discrete_sigma_derivative(a * v0 + b * w0, a * vy + b * wy, y, s);
        const double rhs = a * discrete_sigma_derivative(v0, vy, y, s) + b * discrete_sigma_derivative(w0, wy, y, s);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
        if (vy > v0) CHECK(discrete_sigma_derivative(v0, vy, y, s) > 0.0);
    }
}

TEST_CASE("table of the two-point quotient for exp(y^2)") {
    const std::vector<double> ys{0.5, 0.25, 0.125, 0.0625};
    struct Block {
        double sigma;
        const char* E[4];
        const char* alpha[3];
        const char* sigma_e[3];
    };
    const Block blocks[] = {
        {1.0, {"0.5681", "0.2580", "0.1260", "0.0626"}, {"1.1388", "1.0340", "1.0085"}, {"0.8612", "0.9660", "0.9915"}},
        {0.5, {"0.2008", "0.0645", "0.0223", "0.0078"}, {"1.6388", "1.5340", "1.5085"}, {"0.3612", "0.4660", "0.4915"}},
        {1.5, {"1.2050", "0.7739", "0.5345", "0.3757"}, {"0.6388", "0.5340", "0.5085"}, {"1.3612", "1.4660", "1.4915"}},
    };
    for (const auto& b : blocks) {
        CAPTURE(b.sigma);
        const auto rows = deriv_order_study(b.sigma, DerivTestFunction::ExpYSquared, ys);
        REQUIRE(rows.size() == 4);
        CHECK_FALSE(rows[0].alpha.has_value());
        for (int n = 0; n < 4; ++n) CHECK(four(rows[n].error) == b.E[n]);
        for (int n = 1; n < 4; ++n) {
            CHECK(four(*rows[n].alpha) == b.alpha[n - 1]);
            CHECK(four(*rows[n].sigma_e) == b.sigma_e[n - 1]);
        }
    }
    CHECK_THROWS_AS(deriv_order_study(1.0, DerivTestFunction::ExpYSquared, std::vector<double>{0.25, 0.5}),
                    DomainError);
}

TEST_CASE("order csv layout") {
    const std::vector<double> ys{0.5, 0.25};
    const auto rows = deriv_order_study(1.0, DerivTestFunction::ExpYSquared, ys);
    std::ostringstream out;
    write_deriv_order_csv(out, rows);
    CHECK(out.str() == "sigma,y,E,alpha,sigma_e\n1,0.5,0.5681,,\n1,0.25,0.2580,1.1388,0.8612\n");
}

TEST_CASE("extension kernel has unit mass") {
    namespace bq = boost::math::quadrature;
    bq::exp_sinh<double> rule;
    for (double s : {0.5, 1.0, 1.5}) {
        for (double y : {0.1, 1.0, 10.0}) {
            CAPTURE(s);
            CAPTURE(y);
            // Integrate the even kernel over [0, inf) split at y to help the rule.
            const auto P = [&](double x) { return poisson_kernel(x, y, s); };
            const double near_part = quad::adaptive(P, 0.0, y, 1e-14).value;
            const double far_part = rule.integrate([&](double x) { return P(x); }, y, std::numeric_limits<double>::infinity(), 1e-13);
            CHECK(std::abs(2.0 * (near_part + far_part) - 1.0) < 1e-8);
            CHECK(poisson_kernel(0.0, y, s) == doctest::Approx(poisson_kernel_constant(1, s) / y).epsilon(1e-14));
            CHECK(poisson_kernel(0.7, y, s) == poisson_kernel(-0.7, y, s));
        }
    }
}

TEST_CASE("poisson extension") {
    const auto one = [](double) { return 1.0; };
    const auto odd = [](double x) { return x * std::exp(-x * x); };
    const auto gauss = [](double x) { return std::exp(-x * x); };
    for (double s : {0.4, 1.0, 1.6}) {
        for (double y : {0.05, 0.5, 3.0}) {
            CHECK(poisson_extension(one, 0.3, y, s) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(std::abs(poisson_extension(odd, 0.0, y, s)) < 1e-12);
        }
    }
    // Harmonic extension of exp(-x^2) at x = 0 is exp(y^2) erfc(y).
    for (double y : {0.1, 0.5, 2.0}) {
        CHECK(poisson_extension(gauss, 0.0, y, 1.0) == doctest::Approx(std::exp(y * y) * std::erfc(y)).epsilon(1e-11));
    }
}

TEST_CASE("normalized quotient converges at order 2 - sigma") {
    const auto gauss = [](double x) { return std::exp(-x * x); };
    for (double s : {0.5, 1.0, 1.5}) {
        CAPTURE(s);
        const double exact = -gaussian_frac_laplacian_at_zero(s);
        std::vector<double> ys, errs;
        for (int e = 3; e <= 8; ++e) {
            const double y = std::ldexp(1.0, -e);
            const double v = poisson_extension(gauss, 0.0, y, s, 1e-12);
            ys.push_back(y);
            errs.push_back(std::abs(normalized_sigma_derivative(1.0, v, y, s) - exact));
        }
        const double slope = fit_order(ys, errs);
        CHECK(slope >= 2.0 - s - 0.15);
        CHECK(slope <= 2.0 - s + 0.15);
    }
    const auto one = [](double) { return 1.0; };
    for (double y : {0.5, 0.01}) {
        CHECK(std::abs(normalized_sigma_derivative(1.0, poisson_extension(one, 0.0, y, 0.7), y, 0.7)) < 1e-9);
    }
}

TEST_CASE("quadrature building blocks") {
    const auto r1 = quad::adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13);
    CHECK(r1.value == doctest::Approx(2.0).epsilon(1e-13));
    const auto r2 = quad::to_infinity([](double x) { return std::exp(-x); }, 0.0, 1.0, 1e-12);
    CHECK(r2.value == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(r2.error < 1e-10);
    // int_0^1 x^(-1/2) dx = 2 with the singular endpoint handled by the rule.
    const auto r3 = quad::tanh_sinh(
        [](double x, double xc) {
            const double t = (xc < 0.0 && x < 0.5) ? -xc : x;
            return 1.0 / std::sqrt(t);
        },
        0.0, 1.0, 1e-12);
    CHECK(r3.value == doctest::Approx(2.0).epsilon(1e-10));
}
