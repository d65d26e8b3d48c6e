#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpme {

// Error hierarchy. Everything thrown by the library derives from Error so the
// CLI can map failures onto exit codes without string matching.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a routine (sigma, m, N, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Invalid or inconsistent solver configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Requested time step exceeds the stability bound.
struct CflViolation : Error {
    CflViolation(const std::string& what, double dt, double dt_max)
        : Error(what), dt(dt), dt_max(dt_max) {}
    double dt;
    double dt_max;
};

/// Sparse factorization or solve failure.
struct SolverError : Error {
    SolverError(const std::string& what, double condition_estimate)
        : Error(what), condition_estimate(condition_estimate) {}
    double condition_estimate;
};

/// Adaptive quadrature did not reach the requested tolerance.
struct QuadratureError : Error {
    QuadratureError(const std::string& what, double achieved)
        : Error(what), achieved(achieved) {}
    double achieved;
};

// ---------------------------------------------------------------------------
// Scalar constants of the scheme

/// mu_sigma = 2^(sigma-1) Gamma(sigma/2) / Gamma(1 - sigma/2), sigma in (0,2).
double mu_sigma(double sigma);

/// nu_sigma = sigma * mu_sigma; the coefficient of the explicit trace update.
double nu_sigma(double sigma);

/// Riesz normalization C_{N,sigma} of the singular-integral fractional Laplacian.
double riesz_constant(int N, double sigma);

/// Largest stable time step C(m,f) * dx^sigma with C(m,f) = [m b_max^(m-1) nu_sigma]^(-1)
/// for b_max >= 1 and [m b_max^((m-1)/m) nu_sigma]^(-1) below 1.
/// Returns +infinity for trivial data (b_max = 0, m > 1).
double cfl_max_dt(double m, double b_max, double sigma, double dx);

struct EffectiveOrder {
    double value;
    bool valid;  // false when value <= 0: the discretized operator is inconsistent
};

/// Formal consistency order of L_sigma^{c,d}:
///   sigma in (0,1]: min(c, d - sigma), sigma in (1,2): min(c + 1 - sigma, d - sigma).
/// At sigma = 1 the first-derivative term vanishes and the order is c.
EffectiveOrder effective_order(double sigma, int c, int d);

struct Constants {
    double mu_sigma;
    double nu_sigma;
    double riesz;  // C_{1,sigma}
    double b_max;

    static Constants make(double sigma, double b_max);
};

// ---------------------------------------------------------------------------
// Configuration, mesh, and field

struct SolverConfig {
    double sigma = 1.0;
    double m = 1.0;
    double half_width = 1.0;  // X
    double height = 1.0;      // Y
    double horizon = 1.0;     // T
    int I = 2;
    int K = 2;
    int J = 1;
    int c = 2;
    int d = 1;
    double cfl_safety = 0.95;

    double dx() const { return 2.0 * half_width / I; }
    double dy() const { return height / K; }
    double dt() const { return horizon / J; }

    /// Throws ConfigError on any violated invariant (including dx != dy).
    void validate() const;
};

enum class Region { Interior, TraceBoundary, LateralBoundary };

struct Node {
    int i;
    int k;
    friend bool operator==(const Node&, const Node&) = default;
};

class Grid {
public:
    /// Mesh on [-X, X] x [0, Y] with I x K cells and dx == dy.
    Grid(int I, int K, double half_width, double height);
    explicit Grid(const SolverConfig& config);

    int I() const { return I_; }
    int K() const { return K_; }
    double dx() const { return dx_; }
    double half_width() const { return half_width_; }
    double height() const { return height_; }

    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }
    double x(int i) const { return xs_[static_cast<std::size_t>(i)]; }
    double y(int k) const { return ys_[static_cast<std::size_t>(k)]; }

    Region region(int i, int k) const;

    std::size_t node_count() const { return static_cast<std::size_t>(I_ + 1) * (K_ + 1); }
    std::size_t interior_count() const { return static_cast<std::size_t>(I_ - 1) * (K_ - 1); }
    /// Linear index of node (i,k) in row-major-by-k storage.
    std::size_t index(int i, int k) const { return static_cast<std::size_t>(k) * (I_ + 1) + i; }

    /// Gamma_h nodes in a fixed order: left column, right column, then the top row interior.
    std::vector<Node> lateral_nodes() const;

private:
    int I_;
    int K_;
    double half_width_;
    double height_;
    double dx_;
    std::vector<double> xs_;
    std::vector<double> ys_;
};

/// Values of the extended variable w on every mesh node at one time level.
class Field {
public:
    explicit Field(const Grid& grid, int time_index = 0);

    int I() const { return I_; }
    int K() const { return K_; }
    int time_index() const { return time_index_; }
    void set_time_index(int j) { time_index_ = j; }

    double& operator()(int i, int k) { return values_[index(i, k)]; }
    double operator()(int i, int k) const { return values_[index(i, k)]; }

    std::span<double> row(int k) {
        return std::span<double>(values_).subspan(index(0, k), static_cast<std::size_t>(I_ + 1));
    }
    std::span<const double> row(int k) const {
        return std::span<const double>(values_).subspan(index(0, k), static_cast<std::size_t>(I_ + 1));
    }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double max() const;
    double min() const;

private:
    std::size_t index(int i, int k) const { return static_cast<std::size_t>(k) * (I_ + 1) + i; }

    int I_;
    int K_;
    int time_index_;
    std::vector<double> values_;
};

/// b_max = max of f^m over the trace nodes 0 < i < I.
double trace_b_max(std::span<const double> f_trace, double m);

/// w -> w^(1/m) with w = 0 short-circuited; identity for m = 1.
double root_m(double w, double m);
/// u -> u^m; identity for m = 1.
double power_m(double u, double m);

}  // namespace fpme
