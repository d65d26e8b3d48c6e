#include "fpme/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace fpme::quad {

namespace {

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const Integrand& f, double a, double b) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}

}  // namespace

Result adaptive(const Integrand& f, double a, double b, double abs_tol, int max_panels) {
    if (a == b) return {};
    std::priority_queue<Panel> panels;
    Panel first = evaluate_panel(f, a, b);
    double value = first.value;
    double error = first.error;
    panels.push(first);
    int count = 1;
    while (error > abs_tol && count < max_panels) {
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Panel can no longer be split meaningfully.
        if (std::abs(worst.b - worst.a) <= 64 * std::numeric_limits<double>::epsilon() *
                                                 std::max(std::abs(worst.a), std::abs(worst.b))) {
            break;
        }
        panels.pop();
        const Panel left = evaluate_panel(f, worst.a, mid);
        const Panel right = evaluate_panel(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // Re-sum to shed the drift of the running updates.
    value = 0.0;
    error = 0.0;
    while (!panels.empty()) {
        value += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    return {value, error};
}

Result tanh_sinh(const EndpointIntegrand& f, double a, double b, double rel_tol) {
    boost::math::quadrature::tanh_sinh<double> rule(15);
    double err = 0.0;
    double l1 = 0.0;
    const double v = rule.integrate(f, a, b, rel_tol, &err, &l1);
    return {v, err};
}

Result to_infinity(const Integrand& f, double a, double first_length, double abs_tol, double min_reach,
                   int max_chunks) {
    Result total;
    double lo = a;
    double length = first_length;
    int quiet = 0;
    double last_magnitudes = 0.0;
    const double chunk_tol = abs_tol / 8.0;
    for (int n = 0; n < max_chunks; ++n) {
        const double hi = lo + length;
        // Long chunks get a proportionally larger budget of panels.
        const Result chunk = adaptive(f, lo, hi, chunk_tol / 4.0, 4000 + static_cast<int>(std::min(length, 4e5)));
        total.value += chunk.value;
        total.error += chunk.error;
        if (std::abs(chunk.value) < chunk_tol && hi >= a + min_reach) {
            ++quiet;
            last_magnitudes += std::abs(chunk.value);
            if (quiet == 3) {
                total.error += last_magnitudes;
                return total;
            }
        } else {
            quiet = 0;
            last_magnitudes = 0.0;
        }
        lo = hi;
        length *= 2.0;
    }
    total.error += std::numeric_limits<double>::infinity();
    return total;
}

}  // namespace fpme::quad
