// fpme: fractional porous medium solver and convergence harness.

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fpme/config_file.hpp"
#include "fpme/extension_op.hpp"
#include "fpme/harness.hpp"
#include "fpme/marcher.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

// Accepts decimals and simple fractions such as "1/2".
double parse_number(const std::string& text) {
    const auto slash = text.find('/');
    const auto parse = [&](std::string_view s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) throw fpme::ConfigError("not a number: '" + text + "'");
        return v;
    };
    if (slash == std::string::npos) return parse(text);
    const double den = parse(std::string_view(text).substr(slash + 1));
    if (den == 0.0) throw fpme::ConfigError("zero denominator in '" + text + "'");
    return parse(std::string_view(text).substr(0, slash)) / den;
}

std::vector<double> parse_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            if (!piece.empty()) out.push_back(parse_number(piece));
        }
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fpme::ConfigError("cannot write '" + path + "'");
    return out;
}

int cmd_sigma_table(const std::vector<std::string>& sigma_args, const std::vector<std::string>& y_args,
                    const std::string& out_path) {
    const auto sigmas = sigma_args.empty() ? fpme::default_table_sigmas() : parse_list(sigma_args);
    const auto ys = y_args.empty() ? fpme::default_table_heights() : parse_list(y_args);
    if (sigmas.empty() || ys.empty()) throw fpme::ConfigError("empty sigma or height list");
    const auto result = fpme::run_sigma_table(sigmas, ys);
    if (out_path.empty()) {
        fpme::write_deriv_order_csv(std::cout, result.rows);
    } else {
        auto out = open_out(out_path);
        fpme::write_deriv_order_csv(out, result.rows);
    }
    for (const auto& m : result.mismatches) {
        std::fprintf(stderr, "mismatch sigma=%g y=%g %s: expected %.4f, computed %.6f\n", m.sigma, m.y,
                     m.column.c_str(), m.expected, m.computed);
    }
    return result.mismatches.empty() ? kOk : kCheckFailed;
}

int cmd_solve(const std::string& config_path, const std::vector<std::string>& snapshot_args,
              const std::string& prefix, const std::string& matrix_path) {
    const fpme::RunConfig run = fpme::load_config(config_path);
    run.solver.validate();
    const fpme::Grid grid(run.solver);
    const auto op = fpme::ExtensionOperator::assemble(grid, run.solver.sigma, {run.solver.c, run.solver.d});
    if (!matrix_path.empty()) {
        auto out = open_out(matrix_path);
        op.write_matrix(out);
    }
    const bool monotone = fpme::verify_monotone_structure(op).is_m_structure;

    fpme::MarchOptions options;
    if (!snapshot_args.empty()) options.capture = fpme::SnapshotSchedule::at(parse_list(snapshot_args));
    if (!monotone) options.bounds = fpme::BoundsPolicy::Record;
    const auto f = run.data.sample(grid);
    const auto traj = fpme::march(run.solver, op, f, options);

    {
        auto out = open_out(prefix + "_trace.csv");
        fpme::write_trace_csv(out, traj);
    }
    if (!traj.snapshots.empty()) {
        auto out = open_out(prefix + "_snapshots.csv");
        fpme::write_snapshot_csv(out, traj, grid);
    }
    int bad = 0;
    for (const auto& d : traj.diagnostics) bad += d.bounds_ok ? 0 : 1;
    std::printf("steps %d  dt %.6e  cfl ratio %.4f  b_max %.6e  condition %.3e\n", run.solver.J, traj.dt,
                traj.diagnostics.back().cfl_ratio, traj.b_max, op.condition_estimate());
    if (!monotone) std::printf("stencil (%d,%d) lacks the M-structure; bounds recorded only\n", run.solver.c, run.solver.d);
    if (bad > 0) std::printf("%d steps left [0, b_max]\n", bad);
    return kOk;
}

int cmd_convergence(const fpme::ConvergenceSetup& setup, const std::string& out_path, bool plot) {
    const auto report = fpme::run_convergence(setup);
    if (out_path.empty()) {
        fpme::write_convergence_csv(std::cout, report);
    } else {
        auto out = open_out(out_path);
        fpme::write_convergence_csv(out, report);
    }
    if (plot) {
        std::string svg = out_path.empty() ? "convergence.svg" : out_path;
        if (svg.size() > 4 && svg.substr(svg.size() - 4) == ".csv") svg.resize(svg.size() - 4);
        if (svg.size() < 4 || svg.substr(svg.size() - 4) != ".svg") svg += ".svg";
        auto out = open_out(svg);
        fpme::write_convergence_svg(out, report);
    }
    const auto& p = report.params;
    std::fprintf(stderr, "a = %g, (c,d) = (%d,%s), p = %g, stencil (%d,%d)%s, target order %g%s\n", p.a, p.c,
                 p.d ? std::to_string(*p.d).c_str() : "-", p.p, report.stencil.c, report.stencil.d,
                 report.m_structure ? "" : " [no M-structure]", report.target,
                 p.at_breakpoint ? " (sigma on a table breakpoint; higher-order row used)" : "");
    if (report.degenerate) {
        std::fprintf(stderr, "degenerate study: all errors are zero\n");
        return kCheckFailed;
    }
    for (std::size_t n = 1; n < report.rows.size(); ++n) {
        if (!(report.rows[n].error_trace < report.rows[n - 1].error_trace)) {
            std::fprintf(stderr, "errors not strictly decreasing at level %zu\n", n);
            return kCheckFailed;
        }
    }
    return kOk;
}

int cmd_validate(const fpme::ValidateOptions& options) {
    const auto report = fpme::run_validate(options);
    fpme::print_validate_report(std::cout, report);
    return report.passed() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional porous medium equation solver and convergence harness"};
    app.require_subcommand(1);

    std::vector<std::string> sigma_args;
    std::vector<std::string> y_args;
    std::string table_out;
    auto* table = app.add_subcommand("sigma-table", "Order study of the two-point sigma-derivative");
    table->add_option("--sigmas", sigma_args, "sigma values (comma separated, fractions allowed)");
    table->add_option("--ys", y_args, "heights y, strictly decreasing");
    table->add_option("--out", table_out, "CSV output file (default stdout)");

    std::string config_path;
    std::vector<std::string> snapshot_args;
    std::string prefix = "fpme";
    std::string matrix_path;
    auto* solve = app.add_subcommand("solve", "Run the scheme from a configuration file");
    solve->add_option("--config", config_path, "key = value configuration file")->required();
    solve->add_option("--snapshots", snapshot_args, "times t1,t2,... for full-field snapshots");
    solve->add_option("--out-prefix", prefix, "prefix for <P>_trace.csv and <P>_snapshots.csv");
    solve->add_option("--dump-matrix", matrix_path, "write the assembled matrix as 'row col value' lines");

    fpme::ConvergenceSetup setup;
    std::string mode_text = "optimal";
    std::string data_text = "gaussian";
    std::string conv_out;
    bool plot = false;
    auto* conv = app.add_subcommand("convergence", "Refinement study with order estimates");
    conv->add_option("--sigma", setup.sigma, "fractional order in (0,2)")->required();
    conv->add_option("--m", setup.m, "nonlinearity exponent m >= 1")->required();
    conv->add_option("--mode", mode_text, "practical | optimal | minimal:DELTA")->required();
    conv->add_option("--levels", setup.levels, "number of refinement levels (>= 3)")->required();
    conv->add_option("--base-I", setup.base_I, "intervals in x on the coarsest level");
    conv->add_option("--X", setup.half_width, "half-width of the domain");
    conv->add_option("--Y", setup.height, "height of the domain");
    conv->add_option("--T", setup.horizon, "final time");
    conv->add_option("--cfl-safety", setup.cfl_safety, "fraction of the CFL bound");
    conv->add_option("--data", data_text, "initial data preset");
    conv->add_option("--out", conv_out, "CSV output file (default stdout)");
    conv->add_flag("--plot", plot, "also write an SVG log-log error plot");

    fpme::ValidateOptions vopts;
    auto* validate = app.add_subcommand("validate", "Oracle consistency checks");
    validate->add_option("--mu-scale", vopts.mu_scale, "scale applied to mu_sigma (fault injection)")->group("");
    validate->add_option("--quad-tol", vopts.quad_tol, "principal-value tolerance (fault injection)")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*table) return cmd_sigma_table(sigma_args, y_args, table_out);
        if (*solve) return cmd_solve(config_path, snapshot_args, prefix, matrix_path);
        if (*conv) {
            setup.mode = fpme::SchemeMode::parse(mode_text);
            setup.data = fpme::InitialData::parse(data_text);
            return cmd_convergence(setup, conv_out, plot);
        }
        if (*validate) return cmd_validate(vopts);
    } catch (const fpme::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const fpme::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const fpme::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kConfigError;
}
