#include "fpme/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fpme {

namespace {

void require_sigma(double sigma, const char* who) {
    if (!(sigma > 0.0 && sigma < 2.0)) {
        std::ostringstream msg;
        msg << who << ": sigma must lie in (0,2), got " << sigma;
        throw DomainError(msg.str());
    }
}

}  // namespace

double mu_sigma(double sigma) {
    require_sigma(sigma, "mu_sigma");
    return std::exp2(sigma - 1.0) * std::tgamma(0.5 * sigma) / std::tgamma(1.0 - 0.5 * sigma);
}

double nu_sigma(double sigma) { return sigma * mu_sigma(sigma); }

double riesz_constant(int N, double sigma) {
    require_sigma(sigma, "riesz_constant");
    if (N < 1) throw DomainError("riesz_constant: N must be >= 1");
    const double n = static_cast<double>(N);
    return std::exp2(sigma - 1.0) * sigma * std::tgamma(0.5 * (n + sigma)) /
           (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - 0.5 * sigma));
}

double cfl_max_dt(double m, double b_max, double sigma, double dx) {
    require_sigma(sigma, "cfl_max_dt");
    if (!(m >= 1.0)) throw DomainError("cfl_max_dt: m must be >= 1");
    if (!(b_max >= 0.0) || !std::isfinite(b_max)) throw DomainError("cfl_max_dt: b_max must be finite and >= 0");
    if (!(dx > 0.0)) throw DomainError("cfl_max_dt: dx must be > 0");
    if (b_max == 0.0 && m > 1.0) return std::numeric_limits<double>::infinity();
    // The trace update needs m u^(m-1) nu dt / dx^sigma <= 1 for every u <= b_max^(1/m).
    // b_max^(m-1) covers that only when b_max >= 1; below 1 the binding factor is b_max^((m-1)/m).
    const double growth = std::max(std::pow(b_max, m - 1.0), std::pow(b_max, (m - 1.0) / m));
    const double slope = m * growth * nu_sigma(sigma);
    return std::pow(dx, sigma) / slope;
}

EffectiveOrder effective_order(double sigma, int c, int d) {
    require_sigma(sigma, "effective_order");
    if (c < 1 || d < 1) throw DomainError("effective_order: stencil orders must be >= 1");
    double a;
    if (sigma == 1.0) {
        a = c;
    } else if (sigma < 1.0) {
        a = std::min<double>(c, d - sigma);
    } else {
        a = std::min<double>(c + 1.0 - sigma, d - sigma);
    }
    return {a, a > 0.0};
}

Constants Constants::make(double sigma, double b_max) {
    const double mu = fpme::mu_sigma(sigma);
    return {mu, sigma * mu, riesz_constant(1, sigma), b_max};
}

void SolverConfig::validate() const {
    std::ostringstream msg;
    if (!(sigma > 0.0 && sigma < 2.0)) msg << "sigma must lie in (0,2); ";
    if (!(m >= 1.0) || !std::isfinite(m)) msg << "m must be >= 1; ";
    if (!(half_width > 0.0) || !std::isfinite(half_width)) msg << "X must be > 0; ";
    if (!(height > 0.0) || !std::isfinite(height)) msg << "Y must be > 0; ";
    if (!(horizon > 0.0) || !std::isfinite(horizon)) msg << "T must be > 0; ";
    if (I < 2) msg << "I must be >= 2; ";
    if (K < 2) msg << "K must be >= 2; ";
    if (J < 1) msg << "J must be >= 1; ";
    if (c < 1 || d < 1) msg << "c and d must be >= 1; ";
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) msg << "cfl_safety must lie in (0,1]; ";
    if (msg.str().empty()) {
        const double hx = dx();
        const double hy = dy();
        if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy)) {
            msg << "mesh must be isotropic: dx = 2X/I = " << hx << " but dy = Y/K = " << hy;
        }
    }
    if (!msg.str().empty()) throw ConfigError("invalid configuration: " + msg.str());
}

Grid::Grid(int I, int K, double half_width, double height)
    : I_(I), K_(K), half_width_(half_width), height_(height) {
    if (I < 2 || K < 2) throw ConfigError("grid needs I >= 2 and K >= 2");
    if (!(half_width > 0.0) || !(height > 0.0)) throw ConfigError("grid extents must be positive");
    dx_ = 2.0 * half_width / I;
    const double dy = height / K;
    if (std::abs(dx_ - dy) > 1e-12 * std::max(dx_, dy)) {
        std::ostringstream msg;
        msg << "grid must satisfy dx == dy (dx = " << dx_ << ", dy = " << dy << ")";
        throw ConfigError(msg.str());
    }
    xs_.resize(static_cast<std::size_t>(I) + 1);
    ys_.resize(static_cast<std::size_t>(K) + 1);
    for (int i = 0; i <= I; ++i) xs_[i] = i * dx_ - half_width;
    for (int k = 0; k <= K; ++k) ys_[k] = k * dx_;
}

Grid::Grid(const SolverConfig& config)
    : Grid((config.validate(), config.I), config.K, config.half_width, config.height) {}

Region Grid::region(int i, int k) const {
    if (i == 0 || i == I_ || k == K_) return Region::LateralBoundary;
    if (k == 0) return Region::TraceBoundary;
    return Region::Interior;
}

std::vector<Node> Grid::lateral_nodes() const {
    std::vector<Node> nodes;
    nodes.reserve(2 * static_cast<std::size_t>(K_ + 1) + (I_ - 1));
    for (int k = 0; k <= K_; ++k) nodes.push_back({0, k});
    for (int k = 0; k <= K_; ++k) nodes.push_back({I_, k});
    for (int i = 1; i < I_; ++i) nodes.push_back({i, K_});
    return nodes;
}

Field::Field(const Grid& grid, int time_index)
    : I_(grid.I()), K_(grid.K()), time_index_(time_index), values_(grid.node_count(), 0.0) {}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double trace_b_max(std::span<const double> f_trace, double m) {
    double b = 0.0;
    for (std::size_t i = 1; i + 1 < f_trace.size(); ++i) b = std::max(b, power_m(f_trace[i], m));
    return b;
}

double root_m(double w, double m) {
    if (m == 1.0) return w;
    if (w == 0.0) return 0.0;
    return std::exp(std::log(w) / m);
}

double power_m(double u, double m) {
    if (m == 1.0) return u;
    if (u == 0.0) return 0.0;
    return std::exp(m * std::log(u));
}

}  // namespace fpme
