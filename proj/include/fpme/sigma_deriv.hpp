#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fpme/quadrature.hpp"

namespace fpme {

struct SigmaDerivSample {
    double y;
    double F;           // sigma (v(x,y) - v(x,0)) / y^sigma
    double normalized;  // mu_sigma * F
};

/// Two-point quotient sigma (vy - v0) / y^sigma. Approximates lim y^(1-sigma) dv/dy at y = 0.
double discrete_sigma_derivative(double v0, double vy, double y, double sigma);

/// mu_sigma times the two-point quotient; approximates -(-Delta)^(sigma/2) g with error O(y^(2-sigma)).
double normalized_sigma_derivative(double v0, double vy, double y, double sigma);

SigmaDerivSample sigma_deriv_sample(double v0, double vy, double y, double sigma);

/// d_{N,sigma} = Gamma((N+sigma)/2) / (pi^(N/2) Gamma(sigma/2)), the constant giving the
/// extension kernel unit mass in x for every y.
double poisson_kernel_constant(int N, double sigma);

/// P(x,y) = d_{N,sigma} y^sigma / (|x|^2 + y^2)^((N+sigma)/2).
double poisson_kernel(double x, double y, double sigma, int N = 1);

using ScalarFunction = std::function<double(double)>;

/**
 * v(x,y) - g(x) for the L_sigma-harmonic extension of g.
 *
 * With xi = x + y tan(theta) the convolution becomes
 *   d_{1,sigma} int_{-pi/2}^{pi/2} cos(theta)^(sigma-1) (g(x + y tan theta) - g(x)) dtheta,
 * which tanh-sinh handles including the cos^(sigma-1) endpoint behaviour for sigma < 1.
 * Subtracting g(x) inside the integral avoids the cancellation in v - g for small y.
 */
quad::Result extension_increment(const ScalarFunction& g, double x, double y, double sigma,
                                 double rel_tol = 1e-13);

/// v(x,y) = int P(x - xi, y) g(xi) dxi. Throws QuadratureError if the achieved absolute
/// error exceeds abs_tol.
double poisson_extension(const ScalarFunction& g, double x, double y, double sigma, double abs_tol = 1e-10);

enum class DerivTestFunction {
    ExpYSquared,  // f(x,y) = e^{y^2}; exact sigma-derivative at y = 0 is 0
};

struct DerivOrderRow {
    double sigma;
    double y;
    double error;
    std::optional<double> alpha;    // empty on the first row
    std::optional<double> sigma_e;  // 2 - alpha
};

/// Order experiment for the two-point quotient: E(y) = |F(x,y)| and consecutive-row
/// log-ratio exponents. ys must be strictly decreasing with at least two entries.
std::vector<DerivOrderRow> deriv_order_study(double sigma, DerivTestFunction test, std::span<const double> ys);

/// CSV with header `sigma,y,E,alpha,sigma_e`, 4-decimal fixed values, empty cells for the first row.
void write_deriv_order_csv(std::ostream& out, std::span<const DerivOrderRow> rows, bool header = true);

}  // namespace fpme
