#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "fpme/core.hpp"
#include "fpme/extension_op.hpp"

namespace fpme {

/// Explicit trace update produced a bracket below -1e-12.
struct NegativeBracket : Error {
    NegativeBracket(const std::string& what, std::size_t index, double bracket)
        : Error(what), index(index), bracket(bracket) {}
    std::size_t index;
    double bracket;
};

/// A non-finite value appeared during a step.
struct NonFiniteValue : Error {
    NonFiniteValue(const std::string& what, Node node) : Error(what), node(node) {}
    Node node;
};

/// A field left [0, b_max] by more than 1e-10 during a CFL-compliant run.
struct BoundsViolation : Error {
    BoundsViolation(const std::string& what, int step) : Error(what), step(step) {}
    int step;
};

/// W_0: Gamma_d row = f^m(x_i) for 0 < i < I, Gamma_h = 0, interior from the elliptic solve.
/// `f_trace` holds I+1 values; the corner values are ignored (the corners belong to Gamma_h).
Field initialize(const ExtensionOperator& op, std::span<const double> f_trace, double m);

/// Elementwise [nu_sigma (dt/dx^sigma)(row1 - row0) + row0^(1/m)]^m.
/// Brackets in [-1e-12, 0) are clamped to 0; anything lower throws NegativeBracket.
std::vector<double> boundary_update(std::span<const double> row0, std::span<const double> row1, double dt,
                                    double dx, double sigma, double m);

struct StepParams {
    double dt;
    double sigma;
    double m;
};

/// One time step: explicit trace update from rows 0 and 1, Gamma_h = 0, elliptic solve.
Field step(const Field& state, const ExtensionOperator& op, const StepParams& params);

/// Which time levels keep a full-field snapshot. The trace is always recorded.
struct SnapshotSchedule {
    enum class Kind { None, EveryStep, Times };
    Kind kind = Kind::None;
    std::vector<double> times;

    static SnapshotSchedule none() { return {}; }
    static SnapshotSchedule every_step() { return {Kind::EveryStep, {}}; }
    static SnapshotSchedule at(std::vector<double> times) { return {Kind::Times, std::move(times)}; }
    /// t0, t0*ratio, t0*ratio^2, ... up to T.
    static SnapshotSchedule geometric(double t0, double ratio, double T);
};

struct Snapshot {
    double t;
    Field field;
};

struct StepDiagnostics {
    int step;
    double t;
    double max;
    double min;
    double cfl_ratio;     // dt / cfl_max_dt
    bool bounds_ok;       // -1e-10 <= W <= b_max + 1e-10 on every node
    bool max_on_trace;    // global argmax lies in row k = 0
};

struct Trajectory {
    double sigma = 1.0;
    double m = 1.0;
    double dt = 0.0;
    double b_max = 0.0;
    std::vector<double> xs;
    std::vector<Snapshot> snapshots;
    std::vector<std::vector<double>> trace_history;  // J+1 rows of u = w^(1/m) at k = 0
    std::vector<StepDiagnostics> diagnostics;        // J+1 entries, step 0 included
};

enum class BoundsPolicy {
    Enforce,  // abort with BoundsViolation
    Record,   // only flag in diagnostics (used for stencils without the M-structure)
};

struct MarchOptions {
    SnapshotSchedule capture;
    BoundsPolicy bounds = BoundsPolicy::Enforce;
};

/// Runs J steps of the scheme. Throws CflViolation when dt = T/J exceeds
/// cfl_safety * cfl_max_dt(m, b_max, sigma, dx) with b_max taken over the Gamma_d nodes.
Trajectory march(const SolverConfig& config, std::span<const double> f_trace, const MarchOptions& options = {});

/// Same, reusing an already assembled operator (its grid and sigma must match the config).
Trajectory march(const SolverConfig& config, const ExtensionOperator& op, std::span<const double> f_trace,
                 const MarchOptions& options = {});

/// `t,x,u` rows for every step and trace node, 17 significant digits.
void write_trace_csv(std::ostream& out, const Trajectory& trajectory);
/// `t,x,y,w` rows for every captured snapshot and node.
void write_snapshot_csv(std::ostream& out, const Trajectory& trajectory, const Grid& grid);

}  // namespace fpme
