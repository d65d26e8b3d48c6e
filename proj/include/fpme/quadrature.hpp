#pragma once

#include <functional>

namespace fpme::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
};

using Integrand = std::function<double(double)>;

/// Integrand for endpoint-singular rules: f(x, xc) where xc is the signed distance
/// from x to the nearest endpoint (a - x near a, b - x near b).
using EndpointIntegrand = std::function<double(double, double)>;

/// Globally adaptive Gauss-Kronrod (31-point panels) on [a, b] to an absolute tolerance.
/// Returns the best result reached; result.error > abs_tol signals non-convergence.
Result adaptive(const Integrand& f, double a, double b, double abs_tol, int max_panels = 40000);

/// Tanh-sinh on [a, b]; robust for integrable endpoint singularities.
Result tanh_sinh(const EndpointIntegrand& f, double a, double b, double rel_tol);

/**
 * Integral over [a, infinity) as a sum of adaptive panels on [a + L(2^n - 1), a + L(2^(n+1) - 1)].
 * Stops once three consecutive chunk contributions fall below abs_tol / 8. The reported
 * error adds the per-chunk estimates and the magnitude of the final chunk contributions,
 * which dominates the neglected tail for integrands that decay at least algebraically.
 * No stop is taken before the chunks reach a + min_reach.
 */
Result to_infinity(const Integrand& f, double a, double first_length, double abs_tol,
                  double min_reach = 0.0, int max_chunks = 64);

}  // namespace fpme::quad
