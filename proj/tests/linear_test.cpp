#include "mcgraph/linear.hpp"
#include "mcgraph/operators.hpp"

#include <doctest.h>

using namespace mcgraph;

namespace {

std::vector<double> feet_of(const Grid& g, const std::function<double(Vec2)>& f) {
    std::vector<double> out;
    for (const BoundaryFoot& foot : g.feet()) out.push_back(f(foot.point));
    return out;
}

double max_error(const ScalarField& u, const std::function<double(Vec2)>& exact) {
    double e = 0.0;
    for (int id : u.grid().interior_nodes()) e = std::max(e, std::abs(u.node(id) - exact(u.grid().position(id))));
    return e;
}

} // namespace

TEST_CASE("Poisson problem u = r^2 - 1 is recovered") {
    const Grid g = Grid::build(Domain::disk(1.0), 1.0 / 32);
    const ScalarField zero(g);
    const auto exact = [](Vec2 p) { return dot(p, p) - 1.0; };
    const LinearSystem sys = assemble_frozen(zero, std::vector<double>(g.interior_count(), 4.0), feet_of(g, exact));
    LinearSolveInfo info;
    const ScalarField u = solve(sys, &info);
    CHECK(max_error(u, exact) <= 1e-8);
    CHECK(info.relative_residual <= 1e-10);
    CHECK(info.method == "umfpack-lu");
    CHECK(check_m_matrix(sys).is_m_matrix);
}

TEST_CASE("manufactured quadratic with frozen non-trivial coefficients") {
    const Grid g = Grid::build(Domain::ellipse(1.0, 0.6, {0.1, -0.2}), 1.0 / 40);
    // a_ij(grad v) varies from node to node.
    const ScalarField v = ScalarField::from_function(g, [](Vec2 p) { return 0.8 * p.x - 0.3 * p.y + 0.5 * p.x * p.y; });
    const auto exact = [](Vec2 p) { return 1.5 * p.x * p.x - 0.4 * p.x * p.y + 0.9 * p.y * p.y + p.x - 2.0; };
    const Sym2 hess{3.0, -0.4, 1.8};
    const auto grads = gradient(v);
    std::vector<double> source;
    for (const Vec2 q : grads) {
        const Sym2 a = coefficient_matrix(q).a;
        source.push_back(a.xx * hess.xx + 2.0 * a.xy * hess.xy + a.yy * hess.yy);
    }
    const ScalarField u = solve(assemble_frozen(v, source, feet_of(g, exact)));
    CHECK(max_error(u, exact) <= 1e-8);
}

TEST_CASE("discrete maximum principle for harmonic data") {
    for (const Domain& d : {Domain::disk(1.0), Domain::ellipse(1.2, 0.7), Domain::rounded_rect(0.6, 0.4, 0.2)}) {
        const Grid g = Grid::build(d, 1.0 / 32);
        const auto data = [](Vec2 p) { return std::sin(3.0 * p.x) + std::cos(2.0 * p.y) * p.x; };
        const std::vector<double> feet = feet_of(g, data);
        const LinearSystem sys = assemble_frozen(ScalarField(g), std::vector<double>(g.interior_count(), 0.0), feet);
        CHECK(check_m_matrix(sys).is_m_matrix);
        const ScalarField u = solve(sys);
        const double hi = *std::max_element(feet.begin(), feet.end());
        const double lo = *std::min_element(feet.begin(), feet.end());
        for (int id : g.interior_nodes()) {
            CHECK(u.node(id) <= hi + 1e-9);
            CHECK(u.node(id) >= lo - 1e-9);
        }
    }
}

TEST_CASE("the solver reuses its analysis across systems with one pattern") {
    const Grid g = Grid::build(Domain::disk(1.0), 1.0 / 16);
    LinearSolver solver;
    const auto exact = [](Vec2 p) { return p.x * p.y; };
    for (double slope : {0.0, 0.5, 2.0}) {
        const ScalarField v = ScalarField::from_function(g, [slope](Vec2 p) { return slope * p.x; });
        // Hessian of xy is off-diagonal only; a_xy = -v_x v_y = 0 here, so the source vanishes.
        const ScalarField u = solver.solve(assemble_frozen(v, std::vector<double>(g.interior_count(), 0.0), feet_of(g, exact)));
        CHECK(max_error(u, exact) <= 1e-8);
    }
}

TEST_CASE("assembly rejects mismatched data") {
    const Grid g = Grid::build(Domain::disk(1.0), 0.25);
    CHECK_THROWS_AS(assemble_frozen(ScalarField(g), std::vector<double>(3, 0.0), {}), AssemblyError);
}

TEST_CASE("full assembly of T(v) with zero H is the Laplacian at v = 0") {
    const Grid g = Grid::build(Domain::disk(1.0), 1.0 / 16);
    const LinearSystem a = assemble(ScalarField(g), PrescribedCurvature::constant(0.0), BoundaryData::zero(), 2);
    const LinearSystem b = assemble_frozen(ScalarField(g), std::vector<double>(g.interior_count(), 0.0),
                                           std::vector<double>(g.feet().size(), 0.0));
    CHECK((a.matrix - b.matrix).norm() <= 1e-12 * b.matrix.norm());
    CHECK(a.rhs.norm() == 0.0);
}
