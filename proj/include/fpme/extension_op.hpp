#pragma once

#include <Eigen/SparseCore>

#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fpme/core.hpp"

namespace fpme {

/// Orders (c, d) of L_sigma^{c,d} v = y^(1-sigma) Lap^c v + (1-sigma) y^(-sigma) D_y^d v.
struct StencilSpec {
    int c = 2;
    int d = 1;

    friend bool operator==(const StencilSpec&, const StencilSpec&) = default;
};

/// The explicit set of assemblable (c, d) pairs.
std::span<const StencilSpec> supported_stencils();
bool is_supported(StencilSpec spec);

/// One contribution of a known boundary value to an interior equation: the right-hand
/// side of `row` gains coefficient * value.
struct BoundaryCoupling {
    int row;
    std::size_t node;  // linear node index into a Field
    double coefficient;
};

/**
 * Discrete weighted elliptic operator over the interior unknowns.
 *
 * Every equation is stored multiplied by dx^(1+sigma) and by -1, so row (i,k) of the
 * matrix carries weights that depend only on k and sigma, with a positive diagonal.
 * Unknowns are ordered by (k, i): row = (k-1)(I-1) + (i-1). Boundary values enter only
 * the right-hand side. The sparse LU factorization is computed once at assembly and
 * reused by every solve; concurrent solves are fine as long as each owns its Field.
 */
class ExtensionOperator {
public:
    /// Throws ConfigError for an unsupported (c,d) or a mesh too small for the stencil.
    static ExtensionOperator assemble(const Grid& grid, double sigma, StencilSpec spec = {});

    ExtensionOperator(ExtensionOperator&&) noexcept;
    ExtensionOperator& operator=(ExtensionOperator&&) noexcept;
    ~ExtensionOperator();

    const Grid& grid() const { return grid_; }
    double sigma() const { return sigma_; }
    StencilSpec spec() const { return spec_; }
    /// dx^(1+sigma): the factor the stored rows carry relative to L^D.
    double row_scale() const { return row_scale_; }

    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
    std::span<const BoundaryCoupling> boundary_coupling() const { return coupling_; }

    int row_of(int i, int k) const { return (k - 1) * (grid_.I() - 1) + (i - 1); }
    Node node_of(int row) const { return {row % (grid_.I() - 1) + 1, row / (grid_.I() - 1) + 1}; }

    /// Fills the interior of `field` from its boundary values (Gamma_d row and Gamma_h).
    /// Throws SolverError if the residual exceeds 1e-10 * ||rhs||_inf.
    void solve_into(Field& field) const;

    /// Unscaled L^D applied to all nodes of `field`, evaluated at interior nodes in row order.
    std::vector<double> apply(const Field& field) const;

    /// 1-norm condition estimate of the stored matrix (Hager's method).
    double condition_estimate() const { return condition_; }

    /// Coordinate text dump: `row col value`, 0-based, sorted row-major.
    void write_matrix(std::ostream& out) const;

private:
    struct Factorization;

    ExtensionOperator(const Grid& grid, double sigma, StencilSpec spec);

    Grid grid_;
    double sigma_;
    StencilSpec spec_;
    double row_scale_;
    Eigen::SparseMatrix<double> matrix_;
    std::vector<BoundaryCoupling> coupling_;
    std::unique_ptr<Factorization> lu_;
    double condition_ = 0.0;
};

/// Interior values from trace data on Gamma_d (I-1 values, 0 < i < I) and Gamma_h data
/// (in Grid::lateral_nodes order). Returns the interior values in the operator's row order.
std::vector<double> solve_interior(const ExtensionOperator& op, std::span<const double> trace_row,
                                   std::span<const double> lateral);

struct OffendingRow {
    int row;
    Node node;
    std::string reason;
};

struct MonotoneReport {
    bool is_m_structure = true;
    std::vector<OffendingRow> offending_rows;
    int rows_checked = 0;
};

/// Checks the sign pattern sufficient for the discrete maximum principle: positive diagonal,
/// nonpositive off-diagonals (boundary couplings included), weak diagonal dominance, and
/// strict dominance in rows coupled to the boundary.
MonotoneReport verify_monotone_structure(const ExtensionOperator& op);

/// Argmax node of a field; ties go to the smallest k, then the smallest i.
Node discrete_max_location(const Field& field);

}  // namespace fpme
