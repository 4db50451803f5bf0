#pragma once

#include "mcgraph/audit.hpp"
#include "mcgraph/boundary_data.hpp"
#include "mcgraph/curvature.hpp"
#include "mcgraph/grid.hpp"
#include "mcgraph/solver.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mcgraph {

/// A C^2 profile t -> (value, first, second derivative).
struct ProfileValue {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};
using Profile = std::function<ProfileValue(double)>;

/// Distance-like function rho used by the barriers w = psi(rho) + phi.
///  - boundary: distance to the domain boundary (C^2 on the smoothness strip);
///  - radial: |x - center| (C^2 away from the centre);
///  - quadric: distance to the circle (or line) through `center` with unit
///    normal `normal` and curvature `curvature` w.r.t. that normal.
struct DistanceSource {
    enum class Kind { boundary, radial, quadric } kind = Kind::boundary;
    Vec2 center;
    Vec2 normal{1.0, 0.0};
    double curvature = 0.0;

    static DistanceSource boundary() { return {}; }
    static DistanceSource radial(Vec2 c) { return {Kind::radial, c, {1.0, 0.0}, 0.0}; }
    static DistanceSource quadric(Vec2 y0, Vec2 normal, double kappa) { return {Kind::quadric, y0, normal, kappa}; }

    DistanceJet evaluate(const Domain& domain, Vec2 x) const;
};

/// Closed-form evaluation of w = psi(rho) + phi and of M w, Q w at a point,
/// without any discrete differentiation.
struct TransformedPoint {
    bool valid = false;
    double rho = 0.0;
    double w = 0.0;
    double W = 1.0;
    double Mw = 0.0;
    double Qw = 0.0;
};

/// `phi` may be empty (phi = 0).
TransformedPoint transform_point(Vec2 x, const Profile& psi, const std::function<Jet2(Vec2)>& phi,
                                 const DistanceSource& src, const Domain& domain, const PrescribedCurvature& H,
                                 int n, double tau = 1.0);

/// transform_point at every interior node. Nodes where rho is not C^2 (or
/// outside `region`, when given) are excluded and counted.
struct TransformResult {
    ScalarField w;
    ScalarField Mw;
    ScalarField Qw;
    std::vector<char> valid;  ///< per unknown
    int excluded = 0;
};

TransformResult transform_radial(const Grid& grid, const Profile& psi, const std::function<Jet2(Vec2)>& phi,
                                 const DistanceSource& src, const PrescribedCurvature& H, int n, double tau = 1.0,
                                 const std::function<bool(Vec2, double)>& region = {});

// ---------------------------------------------------------------------------
// Constant ledger

struct BarrierParams {
    int n = 2;
    // Height estimate.
    double mu = 0.0;
    double delta = 0.0;
    bool mu_limit = false;  ///< h0 = 0: the bound uses its mu -> 0 limit
    // Boundary-gradient package.
    double tau = 0.0;          ///< smoothness radius
    double d_c2 = 0.0;         ///< ||d||_2 over the strip {d <= tau/2}
    double H_c1 = 0.0;         ///< ||H||_1 = h0 + h1
    double phi_c0 = 0.0;
    double phi_c1 = 0.0;
    double phi_c2 = 0.0;
    double C = 0.0;
    double nu = 0.0;
    double M = 0.0;            ///< ||u||_0 + ||phi||_0
    double log_k = 0.0;        ///< k = nu exp(nu M), kept as a logarithm
    double a = 0.0;
    double psi_prime0 = 0.0;   ///< psi'(0) = exp(nu M)
    double boundary_gradient_bound = 0.0;
    // Global gradient.
    double A = 0.0;
    // Non-existence construction.
    double eps = 0.0;
    double nu_ne = 0.0;
    double R1 = 0.0;
    double R2 = 0.0;
    double kappa_S = 0.0;
    double log_a_ne = 0.0;
    long double a_ne = 0.0L;
    std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------
// Height estimate

struct HeightConstants {
    double mu = 0.0;
    double delta = 0.0;
    bool limit = false;

    /// (e^{mu delta} - 1) / mu, or delta in the limit.
    double growth() const;
};

HeightConstants height_constants(const Domain& domain, const PrescribedCurvature& H, int n);
/// sup|u| <= sup_boundary |u| + (e^{mu delta} - 1)/mu.
EstimateAudit height_bound(const Domain& domain, const PrescribedCurvature& H, int n, double boundary_sup,
                           double measured_sup = 0.0);
EstimateAudit height_audit(const ScalarField& u, const PrescribedCurvature& H, int n);

/// phi(t) = (e^{mu delta}/mu)(1 - e^{-mu t}); t in the limit mu -> 0.
Profile height_profile(const HeightConstants& c);

struct BarrierCheck {
    ScalarField w;
    double max_Q = 0.0;  ///< largest Q w over the checked nodes
    int checked = 0;
    int excluded = 0;
    bool pass = false;
};

/// w = phi(d) + boundary_sup with Q w <= 0 checked on the nodes where d is C^2.
BarrierCheck height_barrier(const Grid& grid, const PrescribedCurvature& H, int n, double boundary_sup);

// ---------------------------------------------------------------------------
// Boundary gradient

/// psi(t) = log(1 + k t)/nu, evaluated stably for huge k.
Profile boundary_gradient_profile(double nu, double log_k);

struct BoundaryGradientPackage {
    BarrierParams params;
    EstimateAudit bound;         ///< sup_boundary |grad u| against ||phi||_1 + psi'(0)
    bool constants_ok = false;   ///< a < 1/nu < tau
    double max_Q_plus = 0.0;     ///< sup of Q w+ over Omega_a samples (must be < 0)
    double min_Q_minus = 0.0;    ///< inf of Q w- (must be > 0)
    int sign_samples = 0;
    bool signs_ok = false;
    bool sandwich_checked = false;
    bool sandwich_ok = false;
    double sandwich_violation = 0.0;
    int sandwich_nodes = 0;
};

/// Throws RefusedError when the Serrin condition fails or the data norms are
/// unavailable. When `u` is given its boundary gradient is audited and the
/// sandwich w- <= u <= w+ is checked on the nodes of Omega_a.
BoundaryGradientPackage boundary_gradient_package(const Domain& domain, const PrescribedCurvature& H, int n,
                                                  const BoundaryData& phi, double u_sup,
                                                  const ScalarField* u = nullptr);

/// sup|grad u| <= (sqrt 3 + sup_boundary|grad u|) exp(2 sup|u| (1 + 8 n ||H||_1)).
EstimateAudit global_gradient_bound(const ScalarField& u, const PrescribedCurvature& H, int n);

// ---------------------------------------------------------------------------
// Comparison

enum class ComparisonVerdict { pass, fail, not_applicable };
const char* to_string(ComparisonVerdict v);

struct ComparisonResult {
    ComparisonVerdict verdict = ComparisonVerdict::not_applicable;
    double max_excess = 0.0;            ///< max of u - v over interior nodes
    double tolerance = 0.0;
    double q_violation = 0.0;           ///< max of Q v - Q u - q_tol (positive when violated)
    double boundary_violation = 0.0;    ///< max of u - v - boundary_tol at the feet
    std::string message;
};

/// If Q u >= Q v - q_tol at interior nodes and u <= v + boundary_tol at the
/// feet, checks u <= v + boundary_tol + 10 h^2 (1 + max|u|, |v|) everywhere.
ComparisonResult comparison_check(const ScalarField& u, const ScalarField& v, const PrescribedCurvature& H, int n,
                                  double boundary_tol, double q_tol = 1e-8);

// ---------------------------------------------------------------------------
// Non-existence

/// psi_ne(t) = sqrt(2/(n-1)) int_t^delta (log(r/a))^{-1/2} dr for t >= a,
/// with a = exp(log_a). Adaptive quadrature, absolute error below 1e-10.
double nonexistence_psi(double t, double log_a, double delta, int n);
/// The step-2 profile with its derivatives.
Profile nonexistence_psi_profile(double log_a, double delta, int n);
/// Step-1 profile sqrt(2/nu)((a - e)^{1/2} - (t - e)^{1/2}).
Profile nonexistence_phi_profile(double nu, double a, double eps_prime);

struct NonexistenceBound {
    BarrierParams params;
    Vec2 y0;
    Vec2 normal;
    double s0 = 0.0;
    double kappa0 = 0.0;
    double H0 = 0.0;
    Vec2 S_center;
    double psi_a = 0.0;
    double sqrt_term = 0.0;   ///< sqrt(2 a / nu_ne)
    double total = 0.0;       ///< psi(a) + sqrt(2 a / nu_ne), must be < eps
    bool S_inside = false;
    // Numerical sign checks of the two barriers.
    double step1_max_Q = 0.0;
    double step1_probe_a = 0.0;
    int step1_samples = 0;
    double step2_max_Q = 0.0;
    int step2_samples = 0;
    double min_key_inequality = 0.0;  ///< min of Delta d + n H - nu over B_R2 samples (> 0)
    std::vector<std::string> warnings;
};

/// Throws NotApplicableError unless (n-1) kappa(y0) < n H(y0) with H >= 0 near y0.
NonexistenceBound nonexistence_bound(const Domain& domain, const PrescribedCurvature& H, int n, double s0,
                                     double eps);

/// Bump data of height eps supported on the boundary arc of radius a around y0.
BoundaryData adversarial_boundary_data(const Domain& domain, double s0, double log_a, double eps);

struct AdversarialRun {
    SolveReport report;
    ScalarField u;
};

struct WitnessSetup {
    Vec2 y0;
    double s0 = 0.0;
    double log_a = 0.0;
    double eps = 0.0;
    bool certificate_applicable = false;
};

struct WitnessResult {
    bool witness = false;
    std::string verdict;                    ///< "WITNESS" or "NO-WITNESS"
    bool divergent = false;                 ///< some run diverged or stagnated
    std::vector<double> local_gradient;     ///< sup |grad u| near y0 per run
    double gradient_ratio = 0.0;            ///< finest over next-finest
    double ball_radius = 0.0;
    double trace_at_y0 = 0.0;               ///< finest run
    double trace_outside = 0.0;             ///< sup of u on feet outside B_a(y0)
    bool trace_violation = false;
    double data_attainment_error = 0.0;     ///< max |u - phi| over feet, finest run
    std::string explanation;
};

/// Throws InsufficientRefinementsError for fewer than two runs. Runs must be
/// ordered from coarse to fine.
WitnessResult nonexistence_witness(const std::vector<AdversarialRun>& runs, const WitnessSetup& setup,
                                   const BoundaryData& phi);

} // namespace mcgraph
