#pragma once

#include "mcgraph/audit.hpp"
#include "mcgraph/boundary_data.hpp"
#include "mcgraph/curvature.hpp"
#include "mcgraph/grid.hpp"
#include "mcgraph/linear.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mcgraph {

struct SolveConfig {
    int n = 2;
    double tol_update = 1e-9;
    /// Target for the residual; unset means 1e-6 (1 + n h0).
    std::optional<double> tol_residual;
    int max_iters = 200;
    double damping = 1.0;
    double damping_floor = 0.125;
    std::vector<double> tau_schedule{0.25, 0.5, 0.75, 1.0};
    double gradient_cap = 1e4;
    int stagnation_window = 20;
    bool keep_stage_fields = false;
    bool run_audits = true;

    /// Throws Error naming the offending field.
    void validate() const;
    double residual_target(const PrescribedCurvature& H) const;
};

enum class Verdict { converged, diverged_gradient, stagnated, linear_failure };

const char* to_string(Verdict v);

struct IterationTrace {
    int stage = 0;
    double tau = 0.0;
    int iteration = 0;  ///< global index, strictly increasing
    double u_sup = 0.0;
    double grad_sup = 0.0;
    double residual = 0.0;
    double update = 0.0;
    double damping = 1.0;
};

struct StageSummary {
    double tau = 0.0;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
    double update = 0.0;
};

struct SolveReport {
    Verdict verdict = Verdict::linear_failure;
    std::string message;
    std::vector<IterationTrace> traces;
    std::vector<StageSummary> stages;
    double wall_time = 0.0;
    double residual = 0.0;          ///< away from the 2h collar
    double collar_residual = 0.0;   ///< within the collar
    double condition_estimate = 0.0;
    std::string linear_method;
    int cross_first_order_nodes = 0;
    MMatrixReport m_matrix;         ///< of the last assembled system
    double u_sup = 0.0;
    double grad_sup = 0.0;
    double boundary_grad_sup = 0.0;
    std::vector<EstimateAudit> audits;
    double h = 0.0;
};

/// One application of the fixed-point map: the solution of the linear
/// problem frozen at u. No damping.
ScalarField picard_step(const ScalarField& u, const PrescribedCurvature& H, const BoundaryData& phi, int n,
                        double tau = 1.0, LinearSolver* solver = nullptr, LinearSolveInfo* info = nullptr);

struct SolveResult {
    ScalarField u;
    SolveReport report;
    std::vector<ScalarField> stage_fields;  ///< converged field per stage when requested
};

/// Continuation over the tau schedule with damped Picard iteration at each
/// stage, warm-started from the previous stage (u = 0 initially). Failure is
/// reported through the verdict, never thrown.
SolveResult solve_dirichlet(const Grid& grid, const PrescribedCurvature& H, const BoundaryData& phi,
                            const SolveConfig& config = {});

/// sup |Q u| over interior nodes at distance >= 2h from the boundary.
double residual_norm(const ScalarField& u, const PrescribedCurvature& H, int n, double tau = 1.0);
/// sup |Q u| over the interior nodes within 2h of the boundary.
double collar_residual_norm(const ScalarField& u, const PrescribedCurvature& H, int n, double tau = 1.0);

/// sup of |grad u| over interior nodes.
double gradient_sup(const ScalarField& u);
/// sup of |grad u| over the boundary feet.
double boundary_gradient_sup(const ScalarField& u);

} // namespace mcgraph
