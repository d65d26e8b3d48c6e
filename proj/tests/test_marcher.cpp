#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fpme/config_file.hpp"
#include "fpme/marcher.hpp"

using namespace fpme;

namespace {

SolverConfig make_config(double sigma, double m, int I, int K, double X, double T, int J) {
    SolverConfig c;
    c.sigma = sigma;
    c.m = m;
    c.I = I;
    c.K = K;
    c.half_width = X;
    c.height = K * 2.0 * X / I;
    c.horizon = T;
    c.J = J;
    return c;
}

// Smallest J keeping dt within cfl_safety of the bound.
int cfl_steps(const SolverConfig& c, std::span<const double> f) {
    const double dt_max = c.cfl_safety * cfl_max_dt(c.m, trace_b_max(f, c.m), c.sigma, c.dx());
    return std::max(1, static_cast<int>(std::ceil(c.horizon / dt_max)));
}

// u(x,t) for u_t + (-Delta)^(1/2) u = 0, u(.,0) = exp(-x^2):
// (1/pi) int_0^inf exp(-xi t) sqrt(pi) exp(-xi^2/4) cos(xi x) dxi, composite Simpson on [0, 40].
double heat_sigma1_gaussian(double x, double t) {
    const int n = 40000;
    const double h = 40.0 / n;
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double xi = j * h;
        const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        s += w * std::exp(-xi * t - 0.25 * xi * xi) * std::cos(xi * x);
    }
    return s * h / 3.0 * std::sqrt(std::numbers::pi) / std::numbers::pi;
}

}  // namespace

TEST_CASE("initialize") {
    const Grid g(16, 8, 2.0, 2.0);
    const auto op = ExtensionOperator::assemble(g, 0.7);
    const std::vector<double> zero(17, 0.0);
    const Field w0 = initialize(op, zero, 2.0);
    CHECK(w0.max() == 0.0);
    CHECK(w0.min() == 0.0);

    const auto bump = InitialData::bump(2.0, 0.0, 1.5).sample(g);
    const Field wb = initialize(op, bump, 2.0);
    CHECK(trace_b_max(bump, 2.0) == doctest::Approx(4.0));
    double row_max = 0.0;
    for (double v : wb.row(0)) row_max = std::max(row_max, v);
    CHECK(row_max == doctest::Approx(4.0));
    CHECK(wb.max() <= 4.0 + 1e-12);

    const std::vector<double> gamma(17, 1.5);
    const Field wc = initialize(op, gamma, 3.0);
    for (int i = 1; i < 16; ++i) CHECK(wc(i, 0) == doctest::Approx(std::pow(1.5, 3.0)).epsilon(1e-14));
    for (int k = 1; k < 8; ++k) {
        for (int i = 1; i < 16; ++i) {
            CHECK(wc(i, k) > 0.0);
            CHECK(wc(i, k) < std::pow(1.5, 3.0));
        }
    }
    std::vector<double> negative(17, 0.1);
    negative[4] = -0.1;
    CHECK_THROWS_AS(initialize(op, negative, 1.0), DomainError);
}

TEST_CASE("boundary update") {
    const std::vector<double> row{0.0, 0.5, 2.0, 3.0};
    for (double m : {1.0, 2.0, 3.0}) {
        const auto same = boundary_update(row, row, 0.01, 0.1, 0.8, m);
        for (std::size_t i = 0; i < row.size(); ++i) CHECK(same[i] == doctest::Approx(row[i]).epsilon(1e-14));
    }
    const std::vector<double> row1{1.0, 0.25, 1.0, 2.0};
    const double sigma = 0.6, dx = 0.05;
    const double dt = std::pow(dx, sigma) / nu_sigma(sigma);
    const auto end = boundary_update(row, row1, dt, dx, sigma, 1.0);
    for (std::size_t i = 0; i < row.size(); ++i) CHECK(end[i] == doctest::Approx(row1[i]).epsilon(1e-13));

    const std::vector<double> a{1.0}, b{0.0};
    CHECK_THROWS_AS(boundary_update(a, b, 10.0 * dt, dx, sigma, 1.0), NegativeBracket);
}

TEST_CASE("boundary update stays in [0, b_max] at the CFL bound") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int trials = 0;
    for (double m : {1.0, 2.0, 3.0}) {
        for (double sigma : {0.5, 1.0, 1.5}) {
            for (int t = 0; t < 56; ++t) {
                const double b_max = 0.2 + 3.0 * u(rng);
                const double dx = 0.01 + 0.3 * u(rng);
                std::vector<double> r0(12), r1(12);
                for (auto& v : r0) v = b_max * u(rng);
                for (auto& v : r1) v = b_max * u(rng);
                const double dt = cfl_max_dt(m, b_max, sigma, dx);
                const auto next = boundary_update(r0, r1, dt, dx, sigma, m);
                for (double v : next) {
                    CHECK(v >= 0.0);
                    CHECK(v <= b_max * (1.0 + 1e-12));
                }
                ++trials;
            }
        }
    }
    CHECK(trials >= 500);
}

TEST_CASE("single steps") {
    const Grid g(8, 8, 1.0, 2.0);
    const auto op = ExtensionOperator::assemble(g, 1.2);
    const StepParams params{0.01, 1.2, 2.0};
    Field zero(g);
    const Field z1 = step(zero, op, params);
    CHECK(z1.max() == 0.0);
    CHECK(z1.min() == 0.0);

    const std::vector<double> gamma(9, 1.0);
    const Field w0 = initialize(op, gamma, 2.0);
    const Field w1 = step(w0, op, params);
    // Mass leaves through the lateral sides first.
    CHECK(w1(1, 0) < w0(1, 0));
    CHECK(w1(7, 0) < w0(7, 0));
    CHECK(w0(4, 0) - w1(4, 0) < w0(1, 0) - w1(1, 0));

    const auto fresh = ExtensionOperator::assemble(g, 1.2);
    const Field a = step(step(w0, op, params), op, params);
    const Field b = step(step(w0, fresh, params), fresh, params);
    for (int k = 0; k <= 8; ++k)
        for (int i = 0; i <= 8; ++i) CHECK(std::abs(a(i, k) - b(i, k)) <= 1e-14);
}

TEST_CASE("march with zero data and CFL enforcement") {
    auto c = make_config(0.5, 2.0, 16, 8, 2.0, 0.1, 5);
    const std::vector<double> zero(17, 0.0);
    const auto traj = march(c, zero, {SnapshotSchedule::every_step()});
    CHECK(traj.snapshots.size() == 6);
    for (const auto& s : traj.snapshots) {
        CHECK(s.field.max() == 0.0);
        CHECK(s.field.min() == 0.0);
    }
    CHECK(traj.trace_history.size() == 6);

    const auto f = InitialData::gaussian(3.0, 1.0).sample(Grid(c));
    c.J = 1;
    CHECK_THROWS_AS(march(c, f), CflViolation);
    c.J = cfl_steps(c, f);
    CHECK_NOTHROW(march(c, f));
}

TEST_CASE("linear case follows the fractional heat semigroup") {
    auto c = make_config(1.0, 1.0, 64, 64, 8.0, 0.05, 1);
    const Grid g(c);
    const auto f = InitialData::gaussian().sample(g);
    c.J = cfl_steps(c, f);
    const auto traj = march(c, f);
    double err = 0.0;
    for (int i = 1; i < 64; ++i) err = std::max(err, std::abs(traj.trace_history.back()[i] - heat_sigma1_gaussian(g.x(i), 0.05)));
    // First-order budget C (dt + dx) with C = 0.5.
    CHECK(err <= 0.5 * (c.dt() + c.dx()));

    // Self-consistency under dt refinement.
    std::vector<std::vector<double>> finals;
    for (int mult : {1, 2, 4}) {
        auto cj = c;
        cj.J = c.J * mult;
        finals.push_back(march(cj, f).trace_history.back());
    }
    double d1 = 0.0, d2 = 0.0;
    for (int i = 0; i <= 64; ++i) {
        d1 = std::max(d1, std::abs(finals[0][i] - finals[1][i]));
        d2 = std::max(d2, std::abs(finals[1][i] - finals[2][i]));
    }
    CHECK(d2 < d1);
}

TEST_CASE("ordering, determinism and lateral zeros") {
    auto c = make_config(0.8, 2.0, 32, 16, 4.0, 0.2, 1);
    const Grid g(c);
    const auto f = InitialData::bump(1.0, 0.0, 2.0).sample(g);
    auto h = f;
    for (auto& v : h) v *= 1.3;
    h[10] += 0.2;
    c.J = cfl_steps(c, h);
    const auto tf = march(c, f, {SnapshotSchedule::every_step()});
    const auto tg = march(c, h, {SnapshotSchedule::every_step()});
    REQUIRE(tf.snapshots.size() == tg.snapshots.size());
    for (std::size_t j = 0; j < tf.snapshots.size(); ++j) {
        const auto a = tf.snapshots[j].field.values();
        const auto b = tg.snapshots[j].field.values();
        for (std::size_t n = 0; n < a.size(); ++n) CHECK(a[n] <= b[n] + 1e-14);
    }
    for (const auto& s : tf.snapshots) {
        for (const auto& node : g.lateral_nodes()) CHECK(s.field(node.i, node.k) == 0.0);
    }

    std::ostringstream a, b;
    write_trace_csv(a, march(c, f));
    write_trace_csv(b, march(c, f));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("t,x,u\n", 0) == 0);
}

TEST_CASE("snapshot schedules and csv") {
    auto c = make_config(1.0, 1.0, 8, 4, 1.0, 0.5, 50);
    const Grid g(c);
    const auto f = InitialData::bump(1.0, 0.0, 0.5).sample(g);
    const auto traj = march(c, f, {SnapshotSchedule::at({0.0, 0.25, 0.5})});
    REQUIRE(traj.snapshots.size() == 3);
    CHECK(traj.snapshots[1].t == doctest::Approx(0.25));
    std::ostringstream out;
    write_snapshot_csv(out, traj, g);
    int lines = 0;
    for (char ch : out.str()) lines += ch == '\n';
    CHECK(lines == 1 + 3 * 9 * 5);
    CHECK(out.str().rfind("t,x,y,w\n", 0) == 0);

    const auto geo = SnapshotSchedule::geometric(0.01, 2.0, 0.1);
    CHECK(geo.times.size() == 4);
    CHECK_THROWS_AS(SnapshotSchedule::geometric(0.01, 1.0, 0.1), DomainError);
}
