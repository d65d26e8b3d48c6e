#include "fpme/oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fpme/core.hpp"

namespace fpme::oracles {

namespace {

void require_sigma(double sigma) {
    if (!(sigma > 0.0 && sigma < 2.0)) throw DomainError("sigma must lie in (0,2)");
}

// Smooth cutoff: 1 on [0,1], 0 on [2,inf), C-infinity in between.
double taper(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double a = std::exp(-1.0 / (2.0 - s));
    const double b = std::exp(-1.0 / (s - 1.0));
    return a / (a + b);
}

constexpr double kMinInnerRadius = 1e-3;
constexpr double kMaxTailRadius = 1 << 16;

}  // namespace

Value frac_laplacian_pv(const ScalarFunction& g, double x, double sigma, double abs_tol) {
    require_sigma(sigma);
    if (!(abs_tol > 0.0)) throw DomainError("frac_laplacian_pv: abs_tol must be positive");
    const double gx = g(x);
    const double C = riesz_constant(1, sigma);
    const double budget = abs_tol / (3.0 * C);

    const auto second_difference = [&](double h) { return (g(x + h) + g(x - h) - 2.0 * gx) / (h * h); };

    // [0, eps]: D2(z) = A + B z^2 + D z^4 + ..., fitted from z = eps, eps/2, eps/4.
    // The gap between the two- and three-term integrals is the error estimate; eps is
    // halved until it fits the budget.
    double eps = 0.5;
    double inner = 0.0;
    double inner_err = 0.0;
    for (;;) {
        const double d1 = second_difference(eps);
        const double d2 = second_difference(0.5 * eps);
        const double d3 = second_difference(0.25 * eps);
        const double e2 = eps * eps;
        const double u1 = e2, u2 = 0.25 * e2, u3 = 0.0625 * e2;
        const double f12 = (d1 - d2) / (u1 - u2);
        const double f23 = (d2 - d3) / (u2 - u3);
        const double D = (f12 - f23) / (u1 - u3);
        const double B3 = f12 - D * (u1 + u2);
        const double A3 = d1 - B3 * u1 - D * u1 * u1;
        const double B2 = f12;
        const double A2 = d1 - B2 * u1;
        const auto integral = [&](double A, double B, double Dc) {
            return -(A * std::pow(eps, 2.0 - sigma) / (2.0 - sigma) + B * std::pow(eps, 4.0 - sigma) / (4.0 - sigma) +
                     Dc * std::pow(eps, 6.0 - sigma) / (6.0 - sigma));
        };
        inner = integral(A3, B3, D);
        const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(gx) + 1e-300) *
                                std::pow(eps, -sigma) / (2.0 - sigma);
        inner_err = std::abs(inner - integral(A2, B2, 0.0)) + roundoff;
        if (inner_err <= budget || eps <= kMinInnerRadius) break;
        eps *= 0.5;
    }

    const quad::Result middle = quad::adaptive(
        [&](double z) { return (2.0 * gx - g(x + z) - g(x - z)) * std::pow(z, -1.0 - sigma); }, eps, 1.0, budget);

    // [1, inf): 2 g(x)/sigma minus int (g(x+z) + g(x-z)) z^(-1-sigma), the latter cut off
    // smoothly at R; R doubles until two consecutive cutoffs agree. A far field that
    // settles to a constant leaves a cutoff error exactly proportional to R^(-sigma), so
    // consecutive cutoffs are also extrapolated in R and either sequence may converge.
    const auto cut_tail = [&](double R) {
        return quad::adaptive(
            [&](double z) { return (g(x + z) + g(x - z)) * std::pow(z, -1.0 - sigma) * taper(z / R); }, 1.0,
            2.0 * R, 0.25 * budget, 400000);
    };
    const double shrink = std::pow(2.0, -sigma);
    double R = std::max(16.0, 4.0 * (1.0 + std::abs(x)));
    quad::Result previous = cut_tail(R);
    double previous_extrapolated = std::numeric_limits<double>::quiet_NaN();
    quad::Result far{};
    double far_value = 0.0;
    double far_err = std::numeric_limits<double>::infinity();
    while (R < kMaxTailRadius) {
        R *= 2.0;
        far = cut_tail(R);
        const double extrapolated = (far.value - shrink * previous.value) / (1.0 - shrink);
        const double raw_err = std::abs(far.value - previous.value) + far.error;
        const double ext_err =
            std::abs(extrapolated - previous_extrapolated) + (far.error + previous.error) / (1.0 - shrink);
        if (raw_err <= ext_err || std::isnan(ext_err)) {
            far_value = far.value;
            far_err = raw_err;
        } else {
            far_value = extrapolated;
            far_err = ext_err;
        }
        if (far_err <= budget) break;
        previous = far;
        previous_extrapolated = extrapolated;
    }
    const double tail = 2.0 * gx / sigma - far_value;

    const double value = C * (inner + middle.value + tail);
    const double error = C * (inner_err + middle.error + far_err);
    if (!(error <= abs_tol)) {
        std::ostringstream msg;
        msg << "frac_laplacian_pv: achieved error " << error << " exceeds tolerance " << abs_tol;
        throw QuadratureError(msg.str(), error);
    }
    return {value, error};
}

Value fractional_heat_solution(const ScalarFunction& f_hat, double x, double t, double sigma, double abs_tol) {
    require_sigma(sigma);
    if (!(t >= 0.0)) throw DomainError("fractional_heat_solution: t must be >= 0");
    const quad::Result r = quad::to_infinity(
        [&](double xi) {
            const double fh = f_hat(xi);
            if (fh == 0.0) return 0.0;
            return std::exp(-std::pow(xi, sigma) * t) * fh * std::cos(xi * x);
        },
        0.0, 1.0, abs_tol * std::numbers::pi, 8.0);
    const Value v{r.value / std::numbers::pi, r.error / std::numbers::pi};
    if (!(v.error_estimate <= abs_tol)) {
        std::ostringstream msg;
        msg << "fractional_heat_solution: achieved error " << v.error_estimate << " exceeds tolerance " << abs_tol;
        throw QuadratureError(msg.str(), v.error_estimate);
    }
    return v;
}

BarenblattExponents barenblatt_exponents(int N, double m, double sigma) {
    require_sigma(sigma);
    if (N < 1) throw DomainError("barenblatt_exponents: N must be >= 1");
    if (!(m >= 1.0)) throw DomainError("barenblatt_exponents: m must be >= 1");
    const double denom = N * (m + 1.0) + sigma;
    return {N / denom, 1.0 / denom};
}

double lateral_bound(double X, double T, int N, double m, double sigma, double C) {
    if (!(X > 0.0) || !(T > 0.0)) throw DomainError("lateral_bound: X and T must be positive");
    const auto e = barenblatt_exponents(N, m, sigma);
    return C * std::pow(T, e.beta * sigma) * std::pow(X, -(N + sigma));
}

double min_domain_half_width(double dx, double a, int N, double sigma, double L) {
    require_sigma(sigma);
    if (!(dx > 0.0 && dx < 1.0)) throw DomainError("min_domain_half_width: dx must lie in (0,1)");
    if (!(a > 0.0) || !(L > 0.0)) throw DomainError("min_domain_half_width: a and L must be positive");
    if (N < 1) throw DomainError("min_domain_half_width: N must be >= 1");
    return L / std::pow(dx, a / (N + sigma));
}

}  // namespace fpme::oracles
