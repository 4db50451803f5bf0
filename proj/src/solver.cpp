#include "mcgraph/solver.hpp"

#include "mcgraph/estimates.hpp"
#include "mcgraph/operators.hpp"

#include <chrono>
#include <limits>
#include <sstream>

namespace mcgraph {

void SolveConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error("invalid solver configuration: " + what); };
    if (n < 2) fail("n must be at least 2");
    if (!(tol_update > 0.0)) fail("tol_update must be positive");
    if (tol_residual && !(*tol_residual > 0.0)) fail("tol_residual must be positive");
    if (max_iters < 1) fail("max_iters must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0)) fail("damping must lie in (0, 1]");
    if (!(damping_floor > 0.0 && damping_floor <= damping)) fail("damping_floor must lie in (0, damping]");
    if (tau_schedule.empty()) fail("tau_schedule must not be empty");
    for (std::size_t k = 0; k < tau_schedule.size(); ++k) {
        if (!(tau_schedule[k] > 0.0 && tau_schedule[k] <= 1.0)) fail("tau_schedule values must lie in (0, 1]");
        if (k > 0 && !(tau_schedule[k] > tau_schedule[k - 1])) fail("tau_schedule must be strictly increasing");
    }
    if (tau_schedule.back() != 1.0) fail("tau_schedule must end at 1");
    if (!(gradient_cap > 0.0)) fail("gradient_cap must be positive");
    if (stagnation_window < 1) fail("stagnation_window must be at least 1");
}

double SolveConfig::residual_target(const PrescribedCurvature& H) const {
    return tol_residual ? *tol_residual : 1e-6 * (1.0 + n * H.h0());
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::diverged_gradient: return "diverged_gradient";
    case Verdict::stagnated: return "stagnated";
    case Verdict::linear_failure: return "linear_failure";
    }
    return "?";
}

ScalarField picard_step(const ScalarField& u, const PrescribedCurvature& H, const BoundaryData& phi, int n,
                        double tau, LinearSolver* solver, LinearSolveInfo* info) {
    const LinearSystem sys = assemble(u, H, phi, n, tau);
    if (solver) return solver->solve(sys, info);
    return solve(sys, info);
}

namespace {

double residual_split(const ScalarField& u, const PrescribedCurvature& H, int n, double tau, bool collar) {
    const ScalarField q = apply_Q(u, H, n, tau);
    const Grid& g = u.grid();
    const double width = 2.0 * g.h();
    const auto nodes = g.interior_nodes();
    double m = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const bool in_collar = g.interior_distance(static_cast<int>(k)) < width;
        if (in_collar == collar) m = std::max(m, std::abs(q.node(nodes[k])));
    }
    return m;
}

} // namespace

double residual_norm(const ScalarField& u, const PrescribedCurvature& H, int n, double tau) {
    return residual_split(u, H, n, tau, false);
}

double collar_residual_norm(const ScalarField& u, const PrescribedCurvature& H, int n, double tau) {
    return residual_split(u, H, n, tau, true);
}

double gradient_sup(const ScalarField& u) {
    double m = 0.0;
    for (int k = 0; k < u.grid().interior_count(); ++k) {
        const double g = norm(node_derivatives(u, k).grad);
        if (!std::isfinite(g)) return std::numeric_limits<double>::infinity();
        m = std::max(m, g);
    }
    return m;
}

double boundary_gradient_sup(const ScalarField& u) {
    double m = 0.0;
    for (Vec2 g : boundary_gradient(u)) m = std::max(m, norm(g));
    return m;
}

SolveResult solve_dirichlet(const Grid& grid, const PrescribedCurvature& H_in, const BoundaryData& phi,
                            const SolveConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const PrescribedCurvature H = H_in.bound() ? H_in : H_in.bind(grid.domain());
    const int n = config.n;
    const double tol_res = config.residual_target(H);

    SolveResult result{ScalarField(grid), {}, {}};
    SolveReport& rep = result.report;
    rep.h = grid.h();
    rep.cross_first_order_nodes = grid.cross_first_order_count();
    ScalarField& u = result.u;
    LinearSolver solver;
    const auto nodes = grid.interior_nodes();
    int global_iter = 0;
    bool failed = false;

    for (std::size_t s = 0; s < config.tau_schedule.size() && !failed; ++s) {
        const double tau = config.tau_schedule[s];
        StageSummary stage;
        stage.tau = tau;
        u.set_boundary(phi, tau);
        double theta = config.damping;
        double prev_res = std::numeric_limits<double>::infinity();
        int non_decreasing = 0;
        for (int it = 1; it <= config.max_iters; ++it) {
            ScalarField next(grid);
            LinearSolveInfo info;
            // The condition estimate costs several extra solves; it is refreshed at the
            // start of each stage and on every step once it approaches the limit.
            solver.options().estimate_condition = it == 1 || !(rep.condition_estimate < 1e10);
            try {
                next = picard_step(u, H, phi, n, tau, &solver, &info);
            } catch (const SolverError& e) {
                rep.verdict = Verdict::linear_failure;
                rep.message = e.what();
                rep.condition_estimate = e.condition_estimate();
                failed = true;
                break;
            } catch (const InvalidFieldError& e) {
                rep.verdict = Verdict::diverged_gradient;
                rep.message = e.what();
                failed = true;
                break;
            }
            if (solver.options().estimate_condition) rep.condition_estimate = info.condition_estimate;
            rep.linear_method = info.method;

            double update = 0.0;
            bool finite = true;
            for (int id : nodes) {
                const double v = (1.0 - theta) * u.node(id) + theta * next.node(id);
                finite = finite && std::isfinite(v);
                update = std::max(update, std::abs(v - u.node(id)));
                next.node(id) = v;
            }
            next.set_boundary(phi, tau);
            next.fill_ghosts();
            const double grad = finite ? gradient_sup(next) : std::numeric_limits<double>::infinity();
            IterationTrace tr;
            tr.stage = static_cast<int>(s);
            tr.tau = tau;
            tr.iteration = ++global_iter;
            tr.damping = theta;
            tr.update = update;
            tr.grad_sup = grad;
            if (!finite || !(grad <= config.gradient_cap)) {
                tr.u_sup = finite ? next.max_abs() : std::numeric_limits<double>::infinity();
                tr.residual = std::numeric_limits<double>::infinity();
                rep.traces.push_back(tr);
                rep.verdict = Verdict::diverged_gradient;
                std::ostringstream os;
                os << "gradient exceeded the cap " << config.gradient_cap << " at tau = " << tau;
                rep.message = os.str();
                failed = true;
                u = std::move(next);
                break;
            }
            const double res = residual_norm(next, H, n, tau);
            tr.u_sup = next.max_abs();
            tr.residual = res;
            rep.traces.push_back(tr);
            u = std::move(next);
            stage.iterations = it;
            stage.residual = res;
            stage.update = update;

            if (update <= config.tol_update && res <= tol_res) {
                stage.converged = true;
                break;
            }
            if (res > prev_res) theta = std::max(0.5 * theta, config.damping_floor);
            non_decreasing = res >= prev_res ? non_decreasing + 1 : 0;
            prev_res = res;
            if (non_decreasing >= config.stagnation_window) {
                rep.verdict = Verdict::stagnated;
                std::ostringstream os;
                os << "residual did not decrease for " << config.stagnation_window << " steps at tau = " << tau;
                rep.message = os.str();
                failed = true;
                break;
            }
        }
        rep.stages.push_back(stage);
        if (!failed && !stage.converged) {
            rep.verdict = Verdict::stagnated;
            std::ostringstream os;
            os << "no convergence within " << config.max_iters << " iterations at tau = " << tau;
            rep.message = os.str();
            failed = true;
        }
        if (!failed && config.keep_stage_fields) result.stage_fields.push_back(u);
    }
    if (!failed) {
        rep.verdict = Verdict::converged;
        rep.message = "converged";
    }

    u.fill_ghosts();
    bool finite = true;
    for (int id : nodes) finite = finite && std::isfinite(u.node(id));
    if (finite) {
        rep.u_sup = u.max_abs();
        rep.grad_sup = gradient_sup(u);
        if (std::isfinite(rep.grad_sup)) {
            rep.boundary_grad_sup = boundary_gradient_sup(u);
            rep.residual = residual_norm(u, H, n);
            rep.collar_residual = collar_residual_norm(u, H, n);
            rep.m_matrix = check_m_matrix(assemble(u, H, phi, n, 1.0));
        }
    }
    if (config.run_audits && rep.verdict == Verdict::converged) {
        rep.audits.push_back(height_audit(u, H, n));
        rep.audits.push_back(global_gradient_bound(u, H, n));
    }
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace mcgraph
