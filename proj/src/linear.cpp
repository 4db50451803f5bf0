#include "mcgraph/linear.hpp"

#include "mcgraph/operators.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/SparseExtra>

#include <umfpack.h>

#include <limits>
#include <sstream>

namespace mcgraph {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Adds the contribution c * D2 along one stencil line to row `row`.
void add_line(std::vector<Eigen::Triplet<double>>& trip, double& rhs, const StencilLine& line, int row,
              const Grid& g, const std::vector<double>& feet, double c) {
    const LineWeights w = second_derivative_weights(line.minus.offset, line.plus.offset);
    trip.emplace_back(row, row, c * w.w0);
    for (auto [side, weight] : {std::pair{&line.minus, w.wm}, std::pair{&line.plus, w.wp}}) {
        if (side->is_foot()) rhs -= c * weight * feet[static_cast<std::size_t>(side->foot)];
        else trip.emplace_back(row, g.unknown(side->node), c * weight);
    }
}

LinearSystem build(const ScalarField& v, const std::vector<double>& source, std::vector<double> foot_values) {
    const Grid& g = v.grid();
    const int N = g.interior_count();
    LinearSystem sys{g, RowMatrix(N, N), Eigen::VectorXd(N), std::move(foot_values)};
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * 9 + 16);
    for (int k = 0; k < N; ++k) {
        const NodeDerivatives d = node_derivatives(v, k);
        const Sym2 a = coefficient_matrix(d.grad).a;
        const auto& L = g.lines(k);
        double rhs = source[static_cast<std::size_t>(k)];
        add_line(trip, rhs, L[0], k, g, sys.foot_values, a.xx);
        add_line(trip, rhs, L[1], k, g, sys.foot_values, a.yy);
        // u_xy = (D2 along (1,1) - D2 along (1,-1)) / 2, and the operator has 2 a_xy u_xy.
        add_line(trip, rhs, L[2], k, g, sys.foot_values, a.xy);
        add_line(trip, rhs, L[3], k, g, sys.foot_values, -a.xy);
        sys.rhs[k] = rhs;
    }
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.matrix.makeCompressed();
    for (int k = 0; k < N; ++k)
        if (sys.matrix.coeff(k, k) == 0.0) throw AssemblyError("zero diagonal entry in assembled system");
    return sys;
}

} // namespace

LinearSystem assemble(const ScalarField& v, const PrescribedCurvature& H, const BoundaryData& phi, int n,
                      double tau) {
    v.validate("assemble");
    const Grid& g = v.grid();
    std::vector<double> source(static_cast<std::size_t>(g.interior_count()), 0.0);
    const auto nodes = g.interior_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double h = H(g.position(nodes[k]));
        if (h == 0.0 || tau == 0.0) continue;
        const Vec2 p = node_derivatives(v, static_cast<int>(k)).grad;
        const double W = std::sqrt(1.0 + dot(p, p));
        source[k] = tau * n * h * W * W * W;
    }
    std::vector<double> feet(g.feet().size());
    for (std::size_t k = 0; k < feet.size(); ++k) feet[k] = tau * phi(g.feet()[k].point, g.feet()[k].s);
    return build(v, source, std::move(feet));
}

LinearSystem assemble_frozen(const ScalarField& v, const std::vector<double>& source,
                             std::vector<double> foot_values) {
    v.validate("assemble_frozen");
    if (source.size() != static_cast<std::size_t>(v.grid().interior_count()) ||
        foot_values.size() != v.grid().feet().size())
        throw AssemblyError("source or boundary values do not match the grid");
    return build(v, source, std::move(foot_values));
}

// ----------------------------------------------------------------------------

// UMFPACK factors; the symbolic analysis is kept while the pattern is unchanged.
struct LinearSolver::State {
    void* symbolic = nullptr;
    void* numeric = nullptr;
    Eigen::Index rows = -1;
    std::vector<int> outer;  // column pointers of the analysed pattern
    std::vector<int> inner;
    ColMatrix A;

    State() = default;
    State(const State&) = delete;
    State& operator=(const State&) = delete;
    ~State() {
        release_numeric();
        if (symbolic) umfpack_di_free_symbolic(&symbolic);
    }
    void release_numeric() {
        if (numeric) umfpack_di_free_numeric(&numeric);
        numeric = nullptr;
    }

    bool same_pattern(const ColMatrix& M) const {
        return symbolic && rows == M.rows() && static_cast<std::size_t>(M.nonZeros()) == inner.size() &&
               std::equal(outer.begin(), outer.end(), M.outerIndexPtr()) &&
               std::equal(inner.begin(), inner.end(), M.innerIndexPtr());
    }

    // Returns false when UMFPACK reports a singular or failed factorization.
    bool factorize(ColMatrix M) {
        release_numeric();
        A = std::move(M);
        A.makeCompressed();
        const int n = static_cast<int>(A.rows());
        if (!same_pattern(A)) {
            if (symbolic) umfpack_di_free_symbolic(&symbolic);
            symbolic = nullptr;
            if (umfpack_di_symbolic(n, n, A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(), &symbolic, nullptr,
                                    nullptr) != UMFPACK_OK)
                return false;
            rows = A.rows();
            outer.assign(A.outerIndexPtr(), A.outerIndexPtr() + A.outerSize() + 1);
            inner.assign(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros());
        }
        const int status =
            umfpack_di_numeric(A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(), symbolic, &numeric, nullptr, nullptr);
        return status == UMFPACK_OK;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b, bool transpose = false) const {
        Eigen::VectorXd x(b.size());
        umfpack_di_solve(transpose ? UMFPACK_At : UMFPACK_A, A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(),
                         x.data(), b.data(), numeric, nullptr, nullptr);
        return x;
    }
};

LinearSolver::LinearSolver(LinearSolverOptions options) : options_(options), state_(std::make_unique<State>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

namespace {

double relative_residual(const ColMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    const double r = (A * x - b).norm();
    const double nb = b.norm();
    return nb > 0.0 ? r / nb : r;
}

double one_norm(const ColMatrix& A) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
        double s = 0.0;
        for (ColMatrix::InnerIterator it(A, j); it; ++it) s += std::abs(it.value());
        m = std::max(m, s);
    }
    return m;
}

// Hager's estimate of ||A^-1||_1 using the LU factors.
template <class LU>
double inverse_one_norm_estimate(const LU& lu, Eigen::Index n) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    for (int iter = 0; iter < 3; ++iter) {
        const Eigen::VectorXd y = lu.solve(x);
        est = y.lpNorm<1>();
        Eigen::VectorXd xi = y.unaryExpr([](double t) { return t >= 0.0 ? 1.0 : -1.0; });
        const Eigen::VectorXd z = lu.solve(xi, true);
        Eigen::Index j = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x)) break;
        x.setZero();
        x[j] = 1.0;
    }
    return est;
}

ScalarField to_field(const LinearSystem& sys, const Eigen::VectorXd& x) {
    ScalarField u(sys.grid);
    const auto nodes = sys.grid.interior_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) u.node(nodes[k]) = x[static_cast<Eigen::Index>(k)];
    u.foot_values() = sys.foot_values;
    u.fill_ghosts();
    return u;
}

} // namespace

ScalarField LinearSolver::solve(const LinearSystem& sys, LinearSolveInfo* info) {
    const ColMatrix A = sys.matrix;
    const Eigen::VectorXd& b = sys.rhs;
    LinearSolveInfo local;
    State& st = *state_;

    const bool factored = st.factorize(A);
    double condition = std::numeric_limits<double>::infinity();
    if (factored) {
        if (options_.estimate_condition) {
            condition = one_norm(A) * inverse_one_norm_estimate(st, A.rows());
            local.condition_estimate = condition;
            if (!(condition <= options_.max_condition)) {
                std::ostringstream os;
                os << "linear system is ill-conditioned (1-norm condition estimate " << condition << ")";
                throw SolverError(os.str(), condition);
            }
        }
        Eigen::VectorXd x = st.solve(b);
        double rr = relative_residual(A, x, b);
        for (int refine = 0; refine < 3 && !(rr <= options_.tolerance); ++refine) {
            x += st.solve(b - A * x);
            rr = relative_residual(A, x, b);
        }
        if (rr <= options_.tolerance) {
            local.method = "umfpack-lu";
            local.relative_residual = rr;
            if (info) *info = local;
            return to_field(sys, x);
        }
    }

    // Iterative fallback with the same tolerance.
    Eigen::BiCGSTAB<ColMatrix, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(options_.tolerance * 0.1);
    it.setMaxIterations(std::max<Eigen::Index>(1000, 4 * A.rows()));
    it.compute(A);
    if (it.info() == Eigen::Success) {
        const Eigen::VectorXd x = it.solve(b);
        const double rr = relative_residual(A, x, b);
        if (rr <= options_.tolerance) {
            local.method = "bicgstab-ilut";
            local.relative_residual = rr;
            if (info) *info = local;
            return to_field(sys, x);
        }
    }
    throw SolverError("linear system could not be solved to the requested tolerance (singular matrix?)", condition);
}

ScalarField solve(const LinearSystem& sys, LinearSolveInfo* info) {
    LinearSolver solver;
    return solver.solve(sys, info);
}

MMatrixReport check_m_matrix(const LinearSystem& sys) {
    MMatrixReport rep;
    const RowMatrix& A = sys.matrix;
    for (Eigen::Index r = 0; r < A.outerSize(); ++r) {
        double diag = 0.0;
        for (RowMatrix::InnerIterator it(A, r); it; ++it)
            if (it.col() == r) diag = it.value();
        bool bad = !(diag < 0.0);
        double worst = 0.0;
        for (RowMatrix::InnerIterator it(A, r); it; ++it) {
            if (it.col() == r) continue;
            if (it.value() < 0.0) {
                bad = true;
                worst = std::max(worst, -it.value() / std::max(std::abs(diag), 1e-300));
            }
        }
        if (bad) {
            rep.is_m_matrix = false;
            ++rep.violating_rows;
            rep.max_violation = std::max(rep.max_violation, worst);
        }
    }
    return rep;
}

void write_matrix_market(const LinearSystem& sys, const std::string& path) {
    if (!Eigen::saveMarket(sys.matrix, path)) throw Error("cannot write matrix file " + path);
}

} // namespace mcgraph
