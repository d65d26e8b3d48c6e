#include "fpme/extension_op.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "fpme/stencil.hpp"

namespace fpme {

namespace {

constexpr std::array<StencilSpec, 6> kSupported{{{2, 1}, {2, 2}, {3, 3}, {4, 4}, {3, 4}, {2, 3}}};

using SpMat = Eigen::SparseMatrix<double>;

}  // namespace

std::span<const StencilSpec> supported_stencils() { return kSupported; }

bool is_supported(StencilSpec spec) {
    return std::find(kSupported.begin(), kSupported.end(), spec) != kSupported.end();
}

struct ExtensionOperator::Factorization {
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
};

ExtensionOperator::ExtensionOperator(const Grid& grid, double sigma, StencilSpec spec)
    : grid_(grid), sigma_(sigma), spec_(spec), row_scale_(std::pow(grid.dx(), 1.0 + sigma)) {}

ExtensionOperator::ExtensionOperator(ExtensionOperator&&) noexcept = default;
ExtensionOperator& ExtensionOperator::operator=(ExtensionOperator&&) noexcept = default;
ExtensionOperator::~ExtensionOperator() = default;

namespace {

// Hager's estimate of ||A^{-1}||_1 from solves with A and A^T.
template <class Lu>
double inverse_one_norm_estimate(Lu& lu, Eigen::Index n) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double estimate = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXd y = lu.solve(x);
        estimate = y.lpNorm<1>();
        const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
        const Eigen::VectorXd z = lu.transpose().solve(xi);
        Eigen::Index j = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x)) break;
        x.setZero();
        x(j) = 1.0;
    }
    return estimate;
}

}  // namespace

ExtensionOperator ExtensionOperator::assemble(const Grid& grid, double sigma, StencilSpec spec) {
    if (!(sigma > 0.0 && sigma < 2.0)) throw DomainError("assemble: sigma must lie in (0,2)");
    if (!is_supported(spec)) {
        throw ConfigError("unsupported stencil orders (c,d) = (" + std::to_string(spec.c) + "," +
                          std::to_string(spec.d) + ")");
    }
    ExtensionOperator op(grid, sigma, spec);
    const int I = grid.I();
    const int K = grid.K();
    const int n = static_cast<int>(grid.interior_count());

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 13);

    // Row weights accumulate per node before being split into unknowns and boundary data.
    std::map<std::size_t, double> row;
    for (int k = 1; k < K; ++k) {
        // Scaled coefficients: dx^(1+sigma) y_k^(1-sigma) / dx^2 = k^(1-sigma), and
        // dx^(1+sigma) (1-sigma) y_k^(-sigma) / dx = (1-sigma) k^(-sigma).
        const double lap_w = std::pow(static_cast<double>(k), 1.0 - sigma);
        const double drift_w = (1.0 - sigma) * std::pow(static_cast<double>(k), -sigma);
        const Stencil1D dyy = make_stencil(2, spec.c, k, K);
        const Stencil1D dy = make_stencil(1, spec.d, k, K);
        for (int i = 1; i < I; ++i) {
            const Stencil1D dxx = make_stencil(2, spec.c, i, I);
            row.clear();
            for (std::size_t s = 0; s < dxx.offsets.size(); ++s) {
                row[grid.index(i + dxx.offsets[s], k)] += lap_w * dxx.weights[s];
            }
            for (std::size_t s = 0; s < dyy.offsets.size(); ++s) {
                row[grid.index(i, k + dyy.offsets[s])] += lap_w * dyy.weights[s];
            }
            if (drift_w != 0.0) {
                for (std::size_t s = 0; s < dy.offsets.size(); ++s) {
                    row[grid.index(i, k + dy.offsets[s])] += drift_w * dy.weights[s];
                }
            }
            const int r = op.row_of(i, k);
            for (const auto& [node, w] : row) {
                if (w == 0.0) continue;
                const int ni = static_cast<int>(node % static_cast<std::size_t>(I + 1));
                const int nk = static_cast<int>(node / static_cast<std::size_t>(I + 1));
                if (grid.region(ni, nk) == Region::Interior) {
                    triplets.emplace_back(r, op.row_of(ni, nk), -w);
                } else {
                    op.coupling_.push_back({r, node, w});
                }
            }
        }
    }
    op.matrix_.resize(n, n);
    op.matrix_.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix_.makeCompressed();

    op.lu_ = std::make_unique<Factorization>();
    op.lu_->lu.analyzePattern(op.matrix_);
    op.lu_->lu.factorize(op.matrix_);
    if (op.lu_->lu.info() != Eigen::Success) {
        throw SolverError("sparse LU factorization failed: " + op.lu_->lu.lastErrorMessage(),
                          std::numeric_limits<double>::infinity());
    }
    double a_norm = 0.0;
    for (int col = 0; col < op.matrix_.outerSize(); ++col) {
        double s = 0.0;
        for (SpMat::InnerIterator it(op.matrix_, col); it; ++it) s += std::abs(it.value());
        a_norm = std::max(a_norm, s);
    }
    op.condition_ = a_norm * inverse_one_norm_estimate(op.lu_->lu, n);
    return op;
}

void ExtensionOperator::solve_into(Field& field) const {
    if (field.I() != grid_.I() || field.K() != grid_.K()) throw DomainError("solve_into: field/grid mismatch");
    const auto values = field.values();
    const Eigen::Index n = matrix_.rows();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (const auto& c : coupling_) {
        const double v = values[c.node];
        if (!std::isfinite(v)) throw DomainError("solve_into: non-finite boundary value");
        rhs(c.row) += c.coefficient * v;
    }
    const Eigen::VectorXd w = lu_->lu.solve(rhs);
    const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
    const double residual = (matrix_ * w - rhs).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-10 * rhs_norm) && !(rhs_norm == 0.0 && residual == 0.0)) {
        std::ostringstream msg;
        msg << "elliptic solve residual " << residual << " exceeds 1e-10 * ||rhs|| = " << 1e-10 * rhs_norm
            << " (condition estimate " << condition_ << ")";
        throw SolverError(msg.str(), condition_);
    }
    for (int k = 1; k < grid_.K(); ++k) {
        for (int i = 1; i < grid_.I(); ++i) field(i, k) = w(row_of(i, k));
    }
}

std::vector<double> ExtensionOperator::apply(const Field& field) const {
    const auto values = field.values();
    const Eigen::Index n = matrix_.rows();
    Eigen::VectorXd interior(n);
    for (int k = 1; k < grid_.K(); ++k) {
        for (int i = 1; i < grid_.I(); ++i) interior(row_of(i, k)) = field(i, k);
    }
    // Stored rows are -dx^(1+sigma) L^D.
    Eigen::VectorXd out = -(matrix_ * interior);
    for (const auto& c : coupling_) out(c.row) += c.coefficient * values[c.node];
    std::vector<double> result(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) result[r] = out(r) / row_scale_;
    return result;
}

void ExtensionOperator::write_matrix(std::ostream& out) const {
    Eigen::SparseMatrix<double, Eigen::RowMajor> rows = matrix_;
    out << std::setprecision(17);
    for (int r = 0; r < rows.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

std::vector<double> solve_interior(const ExtensionOperator& op, std::span<const double> trace_row,
                                   std::span<const double> lateral) {
    const Grid& grid = op.grid();
    const auto lateral_nodes = grid.lateral_nodes();
    if (trace_row.size() != static_cast<std::size_t>(grid.I() - 1)) {
        throw DomainError("solve_interior: trace row must hold I-1 values");
    }
    if (lateral.size() != lateral_nodes.size()) throw DomainError("solve_interior: wrong Gamma_h length");
    Field field(grid);
    for (int i = 1; i < grid.I(); ++i) field(i, 0) = trace_row[static_cast<std::size_t>(i - 1)];
    for (std::size_t n = 0; n < lateral_nodes.size(); ++n) field(lateral_nodes[n].i, lateral_nodes[n].k) = lateral[n];
    op.solve_into(field);
    std::vector<double> interior(grid.interior_count());
    for (int k = 1; k < grid.K(); ++k) {
        for (int i = 1; i < grid.I(); ++i) interior[static_cast<std::size_t>(op.row_of(i, k))] = field(i, k);
    }
    return interior;
}

MonotoneReport verify_monotone_structure(const ExtensionOperator& op) {
    const Eigen::SparseMatrix<double, Eigen::RowMajor> rows = op.matrix();
    const int n = static_cast<int>(rows.rows());
    std::vector<double> boundary_sum(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> positive_coupling(static_cast<std::size_t>(n), false);
    for (const auto& c : op.boundary_coupling()) {
        // Stored as right-hand-side weights, i.e. minus the matrix entry.
        boundary_sum[c.row] += std::abs(c.coefficient);
        if (c.coefficient < 0.0) positive_coupling[c.row] = true;
    }

    MonotoneReport report;
    report.rows_checked = n;
    for (int r = 0; r < n; ++r) {
        double diag = 0.0;
        double off_abs = 0.0;
        bool positive_off = positive_coupling[r];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
            if (it.col() == r) {
                diag = it.value();
            } else {
                off_abs += std::abs(it.value());
                if (it.value() > 0.0) positive_off = true;
            }
        }
        const double tol = 1e-12 * std::max(1.0, std::abs(diag));
        std::string reason;
        if (!(diag > 0.0)) {
            reason = "nonpositive diagonal";
        } else if (positive_off) {
            reason = "positive off-diagonal entry";
        } else if (diag - off_abs < -tol) {
            reason = "not diagonally dominant";
        } else if (boundary_sum[r] > 0.0 && !(diag - off_abs > tol)) {
            reason = "boundary-coupled row not strictly dominant";
        }
        if (!reason.empty()) {
            report.is_m_structure = false;
            report.offending_rows.push_back({r, op.node_of(r), reason});
        }
    }
    return report;
}

Node discrete_max_location(const Field& field) {
    Node best{0, 0};
    double best_value = field(0, 0);
    for (int k = 0; k <= field.K(); ++k) {
        for (int i = 0; i <= field.I(); ++i) {
            if (field(i, k) > best_value) {
                best_value = field(i, k);
                best = {i, k};
            }
        }
    }
    return best;
}

}  // namespace fpme
