#pragma once

#include "mcgraph/boundary_data.hpp"
#include "mcgraph/curvature.hpp"
#include "mcgraph/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>
#include <string>
#include <vector>

namespace mcgraph {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discretization of the frozen-coefficient problem
///   sum a_ij(grad v) u_ij = f  in the domain,  u = g at the boundary feet,
/// with the foot values eliminated into the right-hand side. Unknowns are
/// the interior nodes in lexicographic order. The sparsity pattern depends
/// only on the grid (coefficients that happen to vanish are stored).
struct LinearSystem {
    Grid grid;
    RowMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<double> foot_values;
};

/// System for T(v): a_ij(grad v) u_ij = tau n H |W_v|^3 with u = tau phi on
/// the boundary.
LinearSystem assemble(const ScalarField& v, const PrescribedCurvature& H, const BoundaryData& phi, int n,
                      double tau = 1.0);

/// Same operator with an explicit source per interior node (indexed by
/// unknown) and explicit foot values.
LinearSystem assemble_frozen(const ScalarField& v, const std::vector<double>& source,
                             std::vector<double> foot_values);

struct LinearSolveInfo {
    std::string method;            ///< "umfpack-lu" or "bicgstab-ilut"
    double relative_residual = 0.0;
    double condition_estimate = 0.0;  ///< 1-norm estimate, 0 when not computed
};

struct LinearSolverOptions {
    double tolerance = 1e-10;       ///< relative residual required
    double max_condition = 1e14;
    bool estimate_condition = true;
};

/// Direct sparse solver that keeps the symbolic analysis between systems
/// with the same sparsity pattern.
class LinearSolver {
public:
    explicit LinearSolver(LinearSolverOptions options = {});
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    /// Throws SolverError (carrying the condition estimate) when the matrix
    /// is singular, too ill-conditioned, or no method reaches the tolerance.
    ScalarField solve(const LinearSystem& sys, LinearSolveInfo* info = nullptr);

    LinearSolverOptions& options() { return options_; }

private:
    struct State;
    LinearSolverOptions options_;
    std::unique_ptr<State> state_;
};

ScalarField solve(const LinearSystem& sys, LinearSolveInfo* info = nullptr);

/// Sign structure of the assembled matrix: every off-diagonal entry must have
/// the sign opposite to its (negative) diagonal for the discrete maximum
/// principle to hold.
struct MMatrixReport {
    bool is_m_matrix = true;
    int violating_rows = 0;
    double max_violation = 0.0;  ///< largest wrong-signed off-diagonal relative to |diagonal|
};

MMatrixReport check_m_matrix(const LinearSystem& sys);

/// Matrix Market coordinate dump of the system matrix.
void write_matrix_market(const LinearSystem& sys, const std::string& path);

} // namespace mcgraph
