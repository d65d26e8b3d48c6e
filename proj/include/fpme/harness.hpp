#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fpme/config_file.hpp"
#include "fpme/extension_op.hpp"
#include "fpme/sigma_deriv.hpp"

namespace fpme {

/// How the discretization order a, the stencil orders (c,d) and the time-step
/// exponent p are chosen for a refinement study.
struct SchemeMode {
    enum class Kind { Practical, Optimal, Minimal };
    Kind kind = Kind::Optimal;
    double delta = 0.0;  // Minimal only, > 0

    static SchemeMode practical() { return {Kind::Practical, 0.0}; }
    static SchemeMode optimal() { return {Kind::Optimal, 0.0}; }
    /// Throws DomainError unless delta > 0.
    static SchemeMode minimal(double delta);
    /// "practical", "optimal" or "minimal:DELTA". Throws ConfigError otherwise.
    static SchemeMode parse(const std::string& text);

    std::string name() const;
};

struct SchemeParams {
    double a;              // order of discretization
    int c;                 // Laplacian order
    std::optional<int> d;  // first-derivative order; empty where the drift term vanishes (sigma = 1)
    double p;              // dt = const * dx^p
    bool at_breakpoint;    // sigma sat on a table boundary and the higher-order row was taken
};

/**
 * Optimal:  sigma <= 1: a = 2(2-sigma), p = 2-sigma; sigma > 1: a = 2, p = sigma.
 *           (c,d) = (4,4) for sigma < 1/2, (3,4) for 1/2 < sigma < 1 and sigma > 1, (2,-) at 1.
 * Practical: sigma <= 1: a = 2 sigma, p = sigma; sigma > 1: a = 2, p = sigma.
 *           (c,d) = smallest supported pair whose effective order reaches a.
 * Minimal:  a = sigma + delta, p = sigma, (c,d) = (1,1), (1,2), (2,-), (2,3), (3,4)
 *           on (0,1/2), (1/2,1), {1}, (1,3/2), (3/2,2).
 * sigma = 1/2 and 3/2 take the higher-order neighbour and set at_breakpoint.
 */
SchemeParams select_scheme_params(double sigma, SchemeMode mode);

/// Target order of the trace error: 2-sigma (Optimal), min(p, 2-sigma) (Practical),
/// min(p, 2-sigma, delta) (Minimal).
double target_order(double sigma, SchemeMode mode);

/// The assemblable stencil used to run a scheme: the cheapest supported pair with
/// at least the requested orders.
StencilSpec runnable_stencil(const SchemeParams& params);

/// log(E1/E2) / log(h1/h2). Throws DomainError for non-positive input or h1 == h2.
double estimate_order(double E1, double E2, double h1, double h2);

/// Least-squares slope of log E against log h.
double fit_order(std::span<const double> h, std::span<const double> E);

struct ConvergenceSetup {
    double sigma = 1.0;
    double m = 1.0;
    SchemeMode mode = SchemeMode::optimal();
    int levels = 4;
    int base_I = 16;
    double half_width = 16.0;  // X
    double height = 16.0;      // Y; K = I Y / (2X) so that dy = dx
    double horizon = 0.5;      // T
    double cfl_safety = 0.5;
    InitialData data = InitialData::gaussian();
};

struct ConvergenceRow {
    int level;
    int I;
    double dx;
    double dt;
    int J;
    double error_trace;                // max over Gamma_d at t = T
    std::optional<double> error_field;  // max over all nodes; fine-grid reference only
    std::optional<double> order;        // empty on the first row and for degenerate studies
};

struct ConvergenceReport {
    enum class Reference { Spectral, FineGrid };
    double sigma;
    double m;
    SchemeMode mode;
    SchemeParams params;
    StencilSpec stencil;
    bool m_structure;  // false: bounds were recorded, not enforced
    Reference reference;
    double target;
    bool degenerate = false;  // every error vanished, no order estimates
    std::vector<ConvergenceRow> rows;
};

/// Failure while running one refinement level; `level` is 0-based.
struct LevelError : Error {
    LevelError(const std::string& what, int level) : Error(what), level(level) {}
    int level;
};

/**
 * Refinement study: I = base_I * 2^l, dt = cfl_safety C(m,f) min(dx^p, dx^sigma)
 * snapped down so that it divides T. The reference is the spectral oracle when
 * m = 1 and the data carry a Fourier transform, otherwise a run two halvings finer.
 */
ConvergenceReport run_convergence(const ConvergenceSetup& setup);

/// `level,I,dx,dt,J,error_trace,error_field,order` followed by `reference` and `target`
/// columns; %.10e for reals.
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

/// Log-log plot of the trace error against dx with a slope-`target` guide line.
void write_convergence_svg(std::ostream& out, const ConvergenceReport& report);

struct TableMismatch {
    double sigma;
    double y;
    std::string column;
    double expected;
    double computed;
};

struct SigmaTableResult {
    std::vector<DerivOrderRow> rows;
    std::vector<TableMismatch> mismatches;  // deviations >= 5e-5 from the embedded table
    int checked = 0;                        // number of compared entries
};

/// Default sigmas {1, 1/2, 3/2} and heights {1/2, 1/4, 1/8, 1/16}.
std::vector<double> default_table_sigmas();
std::vector<double> default_table_heights();

/// Runs deriv_order_study(ExpYSquared) per sigma and compares entries that have
/// an embedded reference value; other rows pass through unchecked.
SigmaTableResult run_sigma_table(std::span<const double> sigmas, std::span<const double> ys);

struct ValidateOptions {
    double mu_scale = 1.0;    // multiplies mu_sigma in the sigma-derivative bridge (fault injection)
    double quad_tol = 1e-8;   // tolerance handed to frac_laplacian_pv in the symbol check
};

struct CheckResult {
    std::string name;
    double measured;
    double tolerance;
    bool passed;
};

struct ValidateReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

ValidateReport run_validate(const ValidateOptions& options = {});

void print_validate_report(std::ostream& out, const ValidateReport& report);

/// Individual pieces of the validation suite, also used by the acceptance tests.
/// Worst |(-Delta)^(sigma/2) cos(w x) - |w|^sigma cos(w x)|.
double symbol_check_error(double sigma, double quad_tol = 1e-8);

/// Fitted exponent of |mu F(x,y) + (-Delta)^(sigma/2) g(x)| against y for the Gaussian
/// g = exp(-x^2) at x = 0, over y = 2^-3 .. 2^-8.
double bridge_order(double sigma, double mu_scale = 1.0);

/// Largest relative deviation between the sparse solve and an independent dense solve
/// over a set of small meshes.
double dense_solve_deviation();

}  // namespace fpme
