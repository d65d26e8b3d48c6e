#include "fpme/marcher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace fpme {

namespace {

constexpr double kBracketFloor = -1e-12;
constexpr double kBoundsSlack = 1e-10;

void check_finite(const Field& field) {
    for (int k = 0; k <= field.K(); ++k) {
        for (int i = 0; i <= field.I(); ++i) {
            if (!std::isfinite(field(i, k))) {
                std::ostringstream msg;
                msg << "non-finite value at node (i=" << i << ", k=" << k << ")";
                throw NonFiniteValue(msg.str(), {i, k});
            }
        }
    }
}

std::string format_row(const char* fmt, double a, double b, double c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    return buf;
}

}  // namespace

Field initialize(const ExtensionOperator& op, std::span<const double> f_trace, double m) {
    const Grid& grid = op.grid();
    if (f_trace.size() != static_cast<std::size_t>(grid.I()) + 1) {
        throw DomainError("initialize: initial data must have I+1 trace values");
    }
    Field field(grid, 0);
    for (int i = 1; i < grid.I(); ++i) {
        const double f = f_trace[static_cast<std::size_t>(i)];
        if (!std::isfinite(f) || f < 0.0) {
            throw DomainError("initialize: initial data must be finite and nonnegative (i = " + std::to_string(i) + ")");
        }
        field(i, 0) = power_m(f, m);
    }
    op.solve_into(field);
    check_finite(field);
    return field;
}

std::vector<double> boundary_update(std::span<const double> row0, std::span<const double> row1, double dt,
                                    double dx, double sigma, double m) {
    if (row0.size() != row1.size()) throw DomainError("boundary_update: row length mismatch");
    const double ratio = nu_sigma(sigma) * dt / std::pow(dx, sigma);
    std::vector<double> next(row0.size());
    for (std::size_t i = 0; i < row0.size(); ++i) {
        double bracket = ratio * (row1[i] - row0[i]) + root_m(std::max(row0[i], 0.0), m);
        if (bracket < 0.0) {
            if (bracket < kBracketFloor) {
                std::ostringstream msg;
                msg << "negative bracket " << bracket << " in trace update at index " << i
                    << " (CFL violation or corrupted state)";
                throw NegativeBracket(msg.str(), i, bracket);
            }
            bracket = 0.0;
        }
        next[i] = power_m(bracket, m);
    }
    return next;
}

Field step(const Field& state, const ExtensionOperator& op, const StepParams& params) {
    const Grid& grid = op.grid();
    const int I = grid.I();
    Field next(grid, state.time_index() + 1);
    const auto row0 = state.row(0).subspan(1, static_cast<std::size_t>(I - 1));
    const auto row1 = state.row(1).subspan(1, static_cast<std::size_t>(I - 1));
    const auto updated = boundary_update(row0, row1, params.dt, grid.dx(), params.sigma, params.m);
    for (int i = 1; i < I; ++i) next(i, 0) = updated[static_cast<std::size_t>(i - 1)];
    op.solve_into(next);
    check_finite(next);
    return next;
}

SnapshotSchedule SnapshotSchedule::geometric(double t0, double ratio, double T) {
    if (!(t0 > 0.0) || !(ratio > 1.0)) throw DomainError("geometric schedule needs t0 > 0 and ratio > 1");
    SnapshotSchedule s{Kind::Times, {}};
    for (double t = t0; t <= T * (1.0 + 1e-12); t *= ratio) s.times.push_back(t);
    return s;
}

Trajectory march(const SolverConfig& config, std::span<const double> f_trace, const MarchOptions& options) {
    const Grid grid(config);
    const ExtensionOperator op = ExtensionOperator::assemble(grid, config.sigma, {config.c, config.d});
    return march(config, op, f_trace, options);
}

Trajectory march(const SolverConfig& config, const ExtensionOperator& op, std::span<const double> f_trace,
                 const MarchOptions& options) {
    config.validate();
    const Grid& grid = op.grid();
    if (grid.I() != config.I || grid.K() != config.K || op.sigma() != config.sigma) {
        throw ConfigError("march: operator does not match the configuration");
    }
    if (f_trace.size() != static_cast<std::size_t>(grid.I()) + 1) {
        throw DomainError("march: initial data must have I+1 trace values");
    }
    for (double f : f_trace) {
        if (!std::isfinite(f) || f < 0.0) throw DomainError("march: initial data must be finite and nonnegative");
    }

    Trajectory traj;
    traj.sigma = config.sigma;
    traj.m = config.m;
    traj.dt = config.dt();
    traj.b_max = trace_b_max(f_trace, config.m);
    traj.xs.assign(grid.xs().begin(), grid.xs().end());

    const double dt_max = cfl_max_dt(config.m, traj.b_max, config.sigma, grid.dx());
    const double dt_allowed = config.cfl_safety * dt_max;
    if (traj.dt > dt_allowed * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "time step " << traj.dt << " exceeds cfl_safety * C(m,f) dx^sigma = " << dt_allowed;
        throw CflViolation(msg.str(), traj.dt, dt_allowed);
    }
    const double cfl_ratio = std::isinf(dt_max) ? 0.0 : traj.dt / dt_max;

    std::set<int> capture_steps;
    if (options.capture.kind == SnapshotSchedule::Kind::Times) {
        for (double t : options.capture.times) {
            const long j = std::lround(t / traj.dt);
            capture_steps.insert(static_cast<int>(std::clamp<long>(j, 0, config.J)));
        }
    }
    const auto wants = [&](int j) {
        return options.capture.kind == SnapshotSchedule::Kind::EveryStep || capture_steps.count(j) > 0;
    };

    const auto record = [&](const Field& field, int j) {
        const double t = j * traj.dt;
        std::vector<double> u(static_cast<std::size_t>(grid.I()) + 1);
        const auto row0 = field.row(0);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = root_m(std::max(row0[i], 0.0), config.m);
        traj.trace_history.push_back(std::move(u));

        const double hi = field.max();
        const double lo = field.min();
        const bool ok = lo >= -kBoundsSlack && hi <= traj.b_max + kBoundsSlack;
        traj.diagnostics.push_back({j, t, hi, lo, cfl_ratio, ok, discrete_max_location(field).k == 0});
        if (!ok && options.bounds == BoundsPolicy::Enforce) {
            std::ostringstream msg;
            msg << "discrete maximum principle violated at step " << j << ": min " << lo << ", max " << hi
                << ", b_max " << traj.b_max;
            throw BoundsViolation(msg.str(), j);
        }
        if (wants(j)) traj.snapshots.push_back({t, field});
    };

    Field state = initialize(op, f_trace, config.m);
    record(state, 0);
    const StepParams params{traj.dt, config.sigma, config.m};
    for (int j = 1; j <= config.J; ++j) {
        state = step(state, op, params);
        record(state, j);
    }
    return traj;
}

void write_trace_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,x,u\n";
    for (std::size_t j = 0; j < trajectory.trace_history.size(); ++j) {
        const double t = trajectory.diagnostics[j].t;
        const auto& u = trajectory.trace_history[j];
        for (std::size_t i = 0; i < u.size(); ++i) {
            out << format_row("%.16e,%.16e,%.16e\n", t, trajectory.xs[i], u[i]);
        }
    }
}

void write_snapshot_csv(std::ostream& out, const Trajectory& trajectory, const Grid& grid) {
    out << "t,x,y,w\n";
    char buf[128];
    for (const auto& snap : trajectory.snapshots) {
        for (int k = 0; k <= grid.K(); ++k) {
            for (int i = 0; i <= grid.I(); ++i) {
                std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e\n", snap.t, grid.x(i), grid.y(k),
                              snap.field(i, k));
                out << buf;
            }
        }
    }
}

}  // namespace fpme
