#pragma once

#include <functional>

#include "fpme/quadrature.hpp"

// Independent reference computations. Nothing here shares a code path with the
// finite-difference scheme; the solver is checked against these values.
namespace fpme::oracles {

using ScalarFunction = std::function<double(double)>;

struct Value {
    double value;
    double error_estimate;
};

/**
 * (-Delta)^(sigma/2) g(x) in one dimension from the Riesz singular integral,
 * written with the symmetric second difference
 *
 *   C_{1,sigma} int_0^inf (2 g(x) - g(x+z) - g(x-z)) / z^(1+sigma) dz.
 *
 * Pieces: [0, eps] from a polynomial fit in z^2 of the second difference (eps halved
 * until the fit's error estimate meets the budget), [eps, 1] adaptively, and [1, inf)
 * as the analytic 2 g(x) / sigma minus the integral of (g(x+z) + g(x-z)) z^(-1-sigma)
 * under a smooth cutoff at radius R, with R doubled until two cutoffs agree.
 * Throws QuadratureError when the achieved error estimate exceeds abs_tol.
 */
Value frac_laplacian_pv(const ScalarFunction& g, double x, double sigma, double abs_tol = 1e-8);

/**
 * Solution of u_t + (-Delta)^(sigma/2) u = 0 (the m = 1 equation on the whole line)
 * for even real data given by its Fourier transform f_hat:
 *
 *   u(x,t) = (1/pi) int_0^inf exp(-xi^sigma t) f_hat(xi) cos(xi x) dxi.
 */
Value fractional_heat_solution(const ScalarFunction& f_hat, double x, double t, double sigma, double abs_tol = 1e-9);

struct BarenblattExponents {
    double alpha;
    double beta;
};

/// alpha = N / (N(m+1) + sigma), beta = 1 / (N(m+1) + sigma).
BarenblattExponents barenblatt_exponents(int N, double m, double sigma);

/// Upper bound C T^(beta sigma) / X^(N+sigma) for the solution on the lateral boundary.
double lateral_bound(double X, double T, int N, double m, double sigma, double C = 1.0);

/// Smallest half-width keeping the lateral truncation error at O(dx^a): L / dx^(a/(N+sigma)).
double min_domain_half_width(double dx, double a, int N, double sigma, double L = 1.0);

}  // namespace fpme::oracles
