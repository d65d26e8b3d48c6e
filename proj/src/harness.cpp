#include "fpme/harness.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "fpme/marcher.hpp"
#include "fpme/oracles.hpp"

namespace fpme {

namespace {

constexpr double kBreakTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kBreakTol; }

void require_sigma(double sigma) {
    if (!(sigma > 0.0 && sigma < 2.0)) throw DomainError("sigma must lie in (0,2)");
}

// Supported pairs from cheapest to most expensive.
constexpr std::array<StencilSpec, 6> kByCost{{{2, 1}, {2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}}};

}  // namespace

SchemeMode SchemeMode::minimal(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("minimal mode needs delta > 0");
    return {Kind::Minimal, delta};
}

SchemeMode SchemeMode::parse(const std::string& text) {
    if (text == "practical") return practical();
    if (text == "optimal") return optimal();
    const std::string prefix = "minimal:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string rest = text.substr(prefix.size());
        std::size_t used = 0;
        double delta = 0.0;
        try {
            delta = std::stod(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != rest.size()) throw ConfigError("bad delta in mode '" + text + "'");
        if (!(delta > 0.0)) throw ConfigError("minimal mode needs delta > 0");
        return {Kind::Minimal, delta};
    }
    throw ConfigError("unknown mode '" + text + "' (expected practical, optimal or minimal:DELTA)");
}

std::string SchemeMode::name() const {
    switch (kind) {
        case Kind::Practical:
            return "practical";
        case Kind::Optimal:
            return "optimal";
        case Kind::Minimal: {
            std::ostringstream s;
            s << "minimal:" << delta;
            return s.str();
        }
    }
    return "?";
}

SchemeParams select_scheme_params(double sigma, SchemeMode mode) {
    require_sigma(sigma);
    SchemeParams out{};
    switch (mode.kind) {
        case SchemeMode::Kind::Optimal:
            if (sigma <= 1.0) {
                out.a = 2.0 * (2.0 - sigma);
                out.p = 2.0 - sigma;
            } else {
                out.a = 2.0;
                out.p = sigma;
            }
            if (near(sigma, 1.0)) {
                out.c = 2;
            } else if (sigma < 0.5 || near(sigma, 0.5)) {
                out.c = 4;
                out.d = 4;
                out.at_breakpoint = near(sigma, 0.5);
            } else {
                out.c = 3;
                out.d = 4;
            }
            break;
        case SchemeMode::Kind::Practical:
            if (sigma <= 1.0) {
                out.a = 2.0 * sigma;
                out.p = sigma;
            } else {
                out.a = 2.0;
                out.p = sigma;
            }
            if (near(sigma, 1.0)) {
                out.c = 2;
                break;
            }
            for (const auto& s : kByCost) {
                const EffectiveOrder eo = effective_order(sigma, s.c, s.d);
                if (eo.valid && eo.value >= out.a - kBreakTol) {
                    out.c = s.c;
                    out.d = s.d;
                    break;
                }
            }
            break;
        case SchemeMode::Kind::Minimal:
            if (!(mode.delta > 0.0)) throw DomainError("minimal mode needs delta > 0");
            out.a = sigma + mode.delta;
            out.p = sigma;
            if (near(sigma, 1.0)) {
                out.c = 2;
            } else if (sigma < 0.5 && !near(sigma, 0.5)) {
                out.c = 1;
                out.d = 1;
            } else if (sigma < 1.0) {
                out.c = 1;
                out.d = 2;
                out.at_breakpoint = near(sigma, 0.5);
            } else if (sigma < 1.5 && !near(sigma, 1.5)) {
                out.c = 2;
                out.d = 3;
            } else {
                out.c = 3;
                out.d = 4;
                out.at_breakpoint = near(sigma, 1.5);
            }
            break;
    }
    return out;
}

double target_order(double sigma, SchemeMode mode) {
    const SchemeParams params = select_scheme_params(sigma, mode);
    switch (mode.kind) {
        case SchemeMode::Kind::Optimal:
            return 2.0 - sigma;
        case SchemeMode::Kind::Practical:
            return std::min(params.p, 2.0 - sigma);
        case SchemeMode::Kind::Minimal:
            return std::min({params.p, 2.0 - sigma, mode.delta});
    }
    return 0.0;
}

StencilSpec runnable_stencil(const SchemeParams& params) {
    const int d = params.d.value_or(1);
    for (const auto& s : kByCost) {
        if (s.c >= params.c && s.d >= d) return s;
    }
    throw ConfigError("no supported stencil reaches (c,d) = (" + std::to_string(params.c) + "," +
                      std::to_string(d) + ")");
}

double estimate_order(double E1, double E2, double h1, double h2) {
    if (!(E1 > 0.0) || !(E2 > 0.0)) throw DomainError("estimate_order: errors must be positive");
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw DomainError("estimate_order: mesh sizes must be positive");
    if (h1 == h2) throw DomainError("estimate_order: mesh sizes must differ");
    return std::log(E1 / E2) / std::log(h1 / h2);
}

double fit_order(std::span<const double> h, std::span<const double> E) {
    if (h.size() != E.size() || h.size() < 2) throw DomainError("fit_order: need matching samples, at least two");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(E[i] > 0.0)) throw DomainError("fit_order: samples must be positive");
        const double lx = std::log(h[i]);
        const double ly = std::log(E[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0.0)) throw DomainError("fit_order: mesh sizes must not all coincide");
    return (n * sxy - sx * sy) / denom;
}

namespace {

struct LevelRun {
    SolverConfig config;
    Trajectory trajectory;
    std::optional<Field> final_field;
};

SolverConfig level_config(const ConvergenceSetup& setup, const SchemeParams& params, StencilSpec stencil, int I,
                          const InitialData& data) {
    SolverConfig config;
    config.sigma = setup.sigma;
    config.m = setup.m;
    config.half_width = setup.half_width;
    config.height = setup.height;
    config.horizon = setup.horizon;
    config.I = I;
    const double k_real = I * setup.height / (2.0 * setup.half_width);
    config.K = static_cast<int>(std::lround(k_real));
    if (std::abs(k_real - config.K) > 1e-9 * std::max(1.0, k_real) || config.K < 2) {
        throw ConfigError("height and half-width do not give an integer K with dy = dx at I = " + std::to_string(I));
    }
    config.c = stencil.c;
    config.d = stencil.d;
    config.cfl_safety = setup.cfl_safety;

    const double dx = config.dx();
    const Grid grid(config.I, config.K, config.half_width, config.height);
    const double b_max = trace_b_max(data.sample(grid), setup.m);
    const double dt_cfl = cfl_max_dt(setup.m, b_max, setup.sigma, dx);
    int J = 1;
    if (std::isfinite(dt_cfl)) {
        const double constant = dt_cfl / std::pow(dx, setup.sigma);
        const double dt_rule = setup.cfl_safety * constant * std::min(std::pow(dx, params.p), std::pow(dx, setup.sigma));
        J = static_cast<int>(std::ceil(setup.horizon / dt_rule * (1.0 - 1e-12)));
        J = std::max(J, 1);
    }
    config.J = J;
    return config;
}

LevelRun run_level(const SolverConfig& config, const InitialData& data, BoundsPolicy bounds, bool keep_field) {
    const Grid grid(config);
    const auto f = data.sample(grid);
    MarchOptions options;
    options.bounds = bounds;
    if (keep_field) options.capture = SnapshotSchedule::at({config.horizon});
    LevelRun run{config, march(config, f, options), std::nullopt};
    if (keep_field && !run.trajectory.snapshots.empty()) run.final_field = run.trajectory.snapshots.back().field;
    return run;
}

}  // namespace

ConvergenceReport run_convergence(const ConvergenceSetup& setup) {
    require_sigma(setup.sigma);
    if (!(setup.m >= 1.0)) throw ConfigError("run_convergence: m must be >= 1");
    if (setup.levels < 3) throw ConfigError("run_convergence: at least 3 levels are required");
    if (setup.base_I < 4 || setup.base_I % 2 != 0) throw ConfigError("run_convergence: base I must be even and >= 4");
    if (!(setup.half_width > 0.0) || !(setup.height > 0.0) || !(setup.horizon > 0.0)) {
        throw ConfigError("run_convergence: X, Y and T must be positive");
    }
    if (!(setup.cfl_safety > 0.0 && setup.cfl_safety <= 1.0)) {
        throw ConfigError("run_convergence: cfl_safety must lie in (0,1]");
    }

    ConvergenceReport report;
    report.sigma = setup.sigma;
    report.m = setup.m;
    report.mode = setup.mode;
    report.params = select_scheme_params(setup.sigma, setup.mode);
    report.stencil = runnable_stencil(report.params);
    report.target = target_order(setup.sigma, setup.mode);
    report.reference = (setup.m == 1.0 && setup.data.fourier) ? ConvergenceReport::Reference::Spectral
                                                              : ConvergenceReport::Reference::FineGrid;
    {
        const Grid probe(setup.base_I, std::max(2, static_cast<int>(std::lround(setup.base_I * setup.height /
                                                                                (2.0 * setup.half_width)))),
                         setup.half_width, setup.height);
        const auto op = ExtensionOperator::assemble(probe, setup.sigma, report.stencil);
        report.m_structure = verify_monotone_structure(op).is_m_structure;
    }
    const BoundsPolicy bounds = report.m_structure ? BoundsPolicy::Enforce : BoundsPolicy::Record;
    const bool fine_grid = report.reference == ConvergenceReport::Reference::FineGrid;

    std::vector<LevelRun> runs;
    for (int l = 0; l < setup.levels; ++l) {
        const int I = setup.base_I << l;
        try {
            const SolverConfig config = level_config(setup, report.params, report.stencil, I, setup.data);
            runs.push_back(run_level(config, setup.data, bounds, fine_grid));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw LevelError("level " + std::to_string(l) + " (I = " + std::to_string(I) + "): " + e.what(), l);
        }
    }

    std::optional<LevelRun> reference;
    if (fine_grid) {
        const int I = setup.base_I << (setup.levels + 1);
        try {
            reference = run_level(level_config(setup, report.params, report.stencil, I, setup.data), setup.data,
                                  bounds, true);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw LevelError("reference level " + std::to_string(setup.levels + 1) + " (I = " + std::to_string(I) +
                                 "): " + e.what(),
                             setup.levels + 1);
        }
    }

    for (int l = 0; l < setup.levels; ++l) {
        const LevelRun& run = runs[static_cast<std::size_t>(l)];
        const SolverConfig& c = run.config;
        const auto& u = run.trajectory.trace_history.back();
        ConvergenceRow row{l, c.I, c.dx(), c.dt(), c.J, 0.0, std::nullopt, std::nullopt};
        if (!fine_grid) {
            for (int i = 1; i < c.I; ++i) {
                const double x = run.trajectory.xs[static_cast<std::size_t>(i)];
                const double exact = oracles::fractional_heat_solution(setup.data.fourier, x, c.horizon, c.sigma).value;
                row.error_trace = std::max(row.error_trace, std::abs(u[static_cast<std::size_t>(i)] - exact));
            }
        } else {
            const int r = reference->config.I / c.I;
            const auto& uf = reference->trajectory.trace_history.back();
            for (int i = 1; i < c.I; ++i) {
                row.error_trace = std::max(row.error_trace, std::abs(u[static_cast<std::size_t>(i)] -
                                                                     uf[static_cast<std::size_t>(i * r)]));
            }
            double field_error = 0.0;
            const Field& wc = *run.final_field;
            const Field& wf = *reference->final_field;
            for (int k = 0; k <= c.K; ++k) {
                for (int i = 0; i <= c.I; ++i) field_error = std::max(field_error, std::abs(wc(i, k) - wf(i * r, k * r)));
            }
            row.error_field = field_error;
        }
        report.rows.push_back(row);
    }

    report.degenerate =
        std::all_of(report.rows.begin(), report.rows.end(), [](const ConvergenceRow& r) { return r.error_trace == 0.0; });
    if (!report.degenerate) {
        for (std::size_t n = 1; n < report.rows.size(); ++n) {
            const auto& prev = report.rows[n - 1];
            auto& cur = report.rows[n];
            if (prev.error_trace > 0.0 && cur.error_trace > 0.0) {
                cur.order = estimate_order(prev.error_trace, cur.error_trace, prev.dx, cur.dx);
            }
        }
    }
    return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "level,I,dx,dt,J,error_trace,error_field,order,reference,target\n";
    const char* ref = report.reference == ConvergenceReport::Reference::Spectral ? "spectral" : "fine-grid";
    char buf[256];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.10e,%.10e,%d,%.10e,", r.level, r.I, r.dx, r.dt, r.J, r.error_trace);
        out << buf;
        if (r.error_field) {
            std::snprintf(buf, sizeof buf, "%.10e", *r.error_field);
            out << buf;
        }
        out << ',';
        if (r.order) {
            std::snprintf(buf, sizeof buf, "%.6f", *r.order);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%s,%.6f\n", ref, report.target);
        out << buf;
    }
}

std::vector<double> default_table_sigmas() { return {1.0, 0.5, 1.5}; }
std::vector<double> default_table_heights() { return {0.5, 0.25, 0.125, 0.0625}; }

namespace {

struct ExpectedEntry {
    double sigma;
    double y;
    double E;
    double alpha;  // NaN on the first height
    double sigma_e;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<ExpectedEntry, 12> kTable{{
    {1.0, 0.5, 0.5681, kNaN, kNaN},
    {1.0, 0.25, 0.2580, 1.1388, 0.8612},
    {1.0, 0.125, 0.1260, 1.0340, 0.9660},
    {1.0, 0.0625, 0.0626, 1.0085, 0.9915},
    {0.5, 0.5, 0.2008, kNaN, kNaN},
    {0.5, 0.25, 0.0645, 1.6388, 0.3612},
    {0.5, 0.125, 0.0223, 1.5340, 0.4660},
    {0.5, 0.0625, 0.0078, 1.5085, 0.4915},
    {1.5, 0.5, 1.2050, kNaN, kNaN},
    {1.5, 0.25, 0.7739, 0.6388, 1.3612},
    {1.5, 0.125, 0.5345, 0.5340, 1.4660},
    {1.5, 0.0625, 0.3757, 0.5085, 1.4915},
}};

constexpr double kTableTol = 5e-5;

const ExpectedEntry* lookup(double sigma, double y) {
    for (const auto& e : kTable) {
        if (near(e.sigma, sigma) && near(e.y, y)) return &e;
    }
    return nullptr;
}

}  // namespace

SigmaTableResult run_sigma_table(std::span<const double> sigmas, std::span<const double> ys) {
    SigmaTableResult result;
    for (double sigma : sigmas) {
        require_sigma(sigma);
        std::vector<DerivOrderRow> rows;
        if (ys.size() == 1) {
            // A single height has no order estimate.
            const double y = ys[0];
            rows.push_back({sigma, y, std::abs(discrete_sigma_derivative(1.0, std::exp(y * y), y, sigma)),
                            std::nullopt, std::nullopt});
        } else {
            rows = deriv_order_study(sigma, DerivTestFunction::ExpYSquared, ys);
        }
        for (std::size_t n = 0; n < rows.size(); ++n) {
            const auto& row = rows[n];
            const ExpectedEntry* e = lookup(sigma, row.y);
            if (e == nullptr) continue;
            const auto compare = [&](const char* column, double expected, double computed) {
                ++result.checked;
                if (!(std::abs(expected - computed) < kTableTol)) {
                    result.mismatches.push_back({sigma, row.y, column, expected, computed});
                }
            };
            compare("E", e->E, row.error);
            // The embedded exponents pair each height with its double.
            if (row.alpha && !std::isnan(e->alpha) && n > 0 && near(rows[n - 1].y, 2.0 * row.y)) {
                compare("alpha", e->alpha, *row.alpha);
                compare("sigma_e", e->sigma_e, *row.sigma_e);
            }
        }
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
    return result;
}

double symbol_check_error(double sigma, double quad_tol) {
    double worst = 0.0;
    for (double w : {1.0, 2.0, 3.0}) {
        for (double x : {0.0, 0.3}) {
            const auto g = [w](double z) { return std::cos(w * z); };
            double value = 0.0;
            try {
                value = oracles::frac_laplacian_pv(g, x, sigma, quad_tol).value;
            } catch (const QuadratureError&) {
                return std::numeric_limits<double>::infinity();
            }
            worst = std::max(worst, std::abs(value - std::pow(w, sigma) * std::cos(w * x)));
        }
    }
    return worst;
}

double bridge_order(double sigma, double mu_scale) {
    const auto g = [](double z) { return std::exp(-z * z); };
    const double x = 0.0;
    const double lap = oracles::frac_laplacian_pv(g, x, sigma, 1e-10).value;
    std::vector<double> ys;
    std::vector<double> errors;
    for (int e = 3; e <= 8; ++e) {
        const double y = std::ldexp(1.0, -e);
        const double inc = extension_increment(g, x, y, sigma).value;
        const double F = mu_scale * mu_sigma(sigma) * sigma * inc / std::pow(y, sigma);
        ys.push_back(y);
        errors.push_back(std::abs(F + lap));
    }
    return fit_order(ys, errors);
}

double dense_solve_deviation() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    const std::array<std::pair<int, int>, 4> meshes{{{4, 4}, {6, 5}, {8, 6}, {10, 10}}};
    for (double sigma : {0.5, 1.0, 1.5}) {
        for (const auto& [I, K] : meshes) {
            const double X = 1.0;
            const double dx = 2.0 * X / I;
            const Grid grid(I, K, X, dx * K);
            const auto op = ExtensionOperator::assemble(grid, sigma, {2, 1});
            std::vector<double> trace(static_cast<std::size_t>(I - 1));
            for (auto& v : trace) v = unit(rng);
            std::vector<double> lateral(grid.lateral_nodes().size());
            for (auto& v : lateral) v = unit(rng);
            const auto sparse = solve_interior(op, trace, lateral);

            // Independent dense assembly of the unscaled five-point equations.
            Field known(grid);
            for (int i = 1; i < I; ++i) known(i, 0) = trace[static_cast<std::size_t>(i - 1)];
            const auto nodes = grid.lateral_nodes();
            for (std::size_t n = 0; n < nodes.size(); ++n) known(nodes[n].i, nodes[n].k) = lateral[n];
            const int n = (I - 1) * (K - 1);
            const auto id = [I](int i, int k) { return (k - 1) * (I - 1) + (i - 1); };
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
            for (int k = 1; k < K; ++k) {
                const double y = k * dx;
                const double lap = std::pow(y, 1.0 - sigma) / (dx * dx);
                const double drift = (1.0 - sigma) * std::pow(y, -sigma) / dx;
                for (int i = 1; i < I; ++i) {
                    const int r = id(i, k);
                    const std::array<std::tuple<int, int, double>, 5> terms{{
                        {i - 1, k, lap},
                        {i + 1, k, lap},
                        {i, k - 1, lap},
                        {i, k + 1, lap + drift},
                        {i, k, -4.0 * lap - drift},
                    }};
                    for (const auto& [ti, tk, w] : terms) {
                        if (grid.region(ti, tk) == Region::Interior) {
                            A(r, id(ti, tk)) += w;
                        } else {
                            b(r) -= w * known(ti, tk);
                        }
                    }
                }
            }
            const Eigen::VectorXd dense = A.fullPivLu().solve(b);
            const double scale = dense.lpNorm<Eigen::Infinity>();
            for (int r = 0; r < n; ++r) {
                worst = std::max(worst, std::abs(sparse[static_cast<std::size_t>(r)] - dense(r)) / scale);
            }
        }
    }
    return worst;
}

bool ValidateReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ValidateReport run_validate(const ValidateOptions& options) {
    ValidateReport report;
    const auto add = [&](std::string name, double measured, double tolerance) {
        report.checks.push_back({std::move(name), measured, tolerance, measured <= tolerance});
    };
    for (double sigma : {0.5, 1.0, 1.5}) {
        std::ostringstream name;
        name << "symbol cos(wx), sigma=" << sigma;
        add(name.str(), symbol_check_error(sigma, options.quad_tol), 1e-6);
    }
    for (double sigma : {0.5, 1.0, 1.5}) {
        std::ostringstream name;
        name << "sigma-derivative order, sigma=" << sigma;
        double measured = std::numeric_limits<double>::infinity();
        try {
            measured = std::abs(bridge_order(sigma, options.mu_scale) - (2.0 - sigma));
        } catch (const Error&) {
        }
        add(name.str(), measured, 0.15);
    }
    {
        const auto f_hat = InitialData::gaussian().fourier;
        double worst = 0.0;
        for (double x : {0.0, 0.5, 2.0}) {
            const double a = oracles::fractional_heat_solution(f_hat, x, 0.5, 0.7, 1e-9).value;
            const double b = oracles::fractional_heat_solution(f_hat, x, 0.5, 0.7, 1e-11).value;
            worst = std::max(worst, std::abs(a - b));
        }
        add("heat oracle tolerance consistency", worst, 1e-8);
    }
    add("sparse vs dense elliptic solve", dense_solve_deviation(), 1e-9);
    return report;
}

void print_validate_report(std::ostream& out, const ValidateReport& report) {
    char buf[256];
    for (const auto& c : report.checks) {
        std::snprintf(buf, sizeof buf, "%-4s %-40s measured %.3e  tolerance %.1e\n", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.measured, c.tolerance);
        out << buf;
    }
}

}  // namespace fpme
