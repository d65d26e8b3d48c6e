#include "fpme/sigma_deriv.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "fpme/core.hpp"
#include "fpme/harness.hpp"

namespace fpme {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite ") + what);
}

void require_sigma_y(double y, double sigma) {
    if (!(sigma > 0.0 && sigma < 2.0)) throw DomainError("sigma must lie in (0,2)");
    if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("evaluation height y must be > 0");
}

}  // namespace

double discrete_sigma_derivative(double v0, double vy, double y, double sigma) {
    require_finite(v0, "v(x,0)");
    require_finite(vy, "v(x,y)");
    require_sigma_y(y, sigma);
    return sigma * (vy - v0) / std::pow(y, sigma);
}

double normalized_sigma_derivative(double v0, double vy, double y, double sigma) {
    return mu_sigma(sigma) * discrete_sigma_derivative(v0, vy, y, sigma);
}

SigmaDerivSample sigma_deriv_sample(double v0, double vy, double y, double sigma) {
    const double F = discrete_sigma_derivative(v0, vy, y, sigma);
    return {y, F, mu_sigma(sigma) * F};
}

double poisson_kernel_constant(int N, double sigma) {
    if (N < 1) throw DomainError("poisson_kernel_constant: N must be >= 1");
    if (!(sigma > 0.0 && sigma < 2.0)) throw DomainError("poisson_kernel_constant: sigma must lie in (0,2)");
    const double n = static_cast<double>(N);
    return std::tgamma(0.5 * (n + sigma)) / (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(0.5 * sigma));
}

double poisson_kernel(double x, double y, double sigma, int N) {
    require_sigma_y(y, sigma);
    const double r2 = x * x + y * y;
    return poisson_kernel_constant(N, sigma) * std::pow(y, sigma) * std::pow(r2, -0.5 * (N + sigma));
}

quad::Result extension_increment(const ScalarFunction& g, double x, double y, double sigma, double rel_tol) {
    require_sigma_y(y, sigma);
    const double gx = g(x);
    require_finite(gx, "g(x)");
    const double half_pi = 0.5 * std::numbers::pi;
    // theta in (-pi/2, pi/2); delta = distance to the nearest endpoint, so cos(theta) = sin(delta)
    // and |tan(theta)| = cot(delta) stay accurate right up to the endpoints.
    auto integrand = [&](double theta, double theta_c) {
        const double delta = std::abs(theta_c);
        if (delta == 0.0) return 0.0;
        const double s = std::sin(delta);
        const double shift = std::copysign(y * std::cos(delta) / s, theta);
        const double diff = g(x + shift) - gx;
        if (diff == 0.0) return 0.0;
        return std::pow(s, sigma - 1.0) * diff;
    };
    quad::Result r = quad::tanh_sinh(integrand, -half_pi, half_pi, rel_tol);
    const double d = poisson_kernel_constant(1, sigma);
    r.value *= d;
    r.error *= d;
    return r;
}

double poisson_extension(const ScalarFunction& g, double x, double y, double sigma, double abs_tol) {
    const quad::Result inc = extension_increment(g, x, y, sigma);
    if (!(inc.error <= abs_tol)) {
        std::ostringstream msg;
        msg << "poisson_extension: quadrature reached " << inc.error << " (requested " << abs_tol << ")";
        throw QuadratureError(msg.str(), inc.error);
    }
    return g(x) + inc.value;
}

std::vector<DerivOrderRow> deriv_order_study(double sigma, DerivTestFunction test, std::span<const double> ys) {
    if (ys.size() < 2) throw DomainError("deriv_order_study: need at least two heights");
    for (std::size_t n = 1; n < ys.size(); ++n) {
        if (!(ys[n] < ys[n - 1])) throw DomainError("deriv_order_study: heights must be strictly decreasing");
    }
    std::vector<DerivOrderRow> rows;
    rows.reserve(ys.size());
    for (std::size_t n = 0; n < ys.size(); ++n) {
        const double y = ys[n];
        double error = 0.0;
        switch (test) {
            case DerivTestFunction::ExpYSquared:
                // The exact value is zero, so the error is |F| itself.
                error = std::abs(discrete_sigma_derivative(1.0, std::exp(y * y), y, sigma));
                break;
        }
        DerivOrderRow row{sigma, y, error, std::nullopt, std::nullopt};
        if (n > 0) {
            row.alpha = estimate_order(rows.back().error, error, rows.back().y, y);
            row.sigma_e = 2.0 - *row.alpha;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_deriv_order_csv(std::ostream& out, std::span<const DerivOrderRow> rows, bool header) {
    if (header) out << "sigma,y,E,alpha,sigma_e\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.4f,", r.sigma, r.y, r.error);
        out << buf;
        if (r.alpha) {
            std::snprintf(buf, sizeof buf, "%.4f,%.4f", *r.alpha, *r.sigma_e);
            out << buf;
        } else {
            out << ',';
        }
        out << '\n';
    }
}

}  // namespace fpme
