#include "mcgraph/operators.hpp"
#include "mcgraph/solver.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace mcgraph;

TEST_CASE("grid classification and feet on the unit disk") {
    const Grid g = Grid::build(Domain::disk(1.0), 0.125);
    int interior = 0;
    for (int id = 0; id < g.nx() * g.ny(); ++id) {
        const Vec2 p = g.position(id);
        if (g.classification(id) == NodeClass::interior) {
            ++interior;
            CHECK(norm(p) < 1.0);
        }
    }
    CHECK(interior == g.interior_count());
    for (const BoundaryFoot& f : g.feet()) {
        CHECK(norm(f.point) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.theta > 0.0);
        CHECK(f.theta <= 1.0);
    }
    CHECK_THROWS(Grid::build(Domain::disk(1.0), -0.1));
}

TEST_CASE("derivatives are exact on quadratics, including cut stencils") {
    const Grid g = Grid::build(Domain::ellipse(1.0, 0.7), 1.0 / 16);
    const ScalarField u = ScalarField::from_function(g, [](Vec2 p) {
        return 0.3 * p.x * p.x - 0.7 * p.x * p.y + 1.1 * p.y * p.y + 0.2 * p.x - 0.5 * p.y + 1.0;
    });
    const auto grads = gradient(u);
    const auto hess = hessian(u);
    const auto nodes = g.interior_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Vec2 p = g.position(nodes[k]);
        CHECK(grads[k].x == doctest::Approx(0.6 * p.x - 0.7 * p.y + 0.2).epsilon(1e-9));
        CHECK(grads[k].y == doctest::Approx(-0.7 * p.x + 2.2 * p.y - 0.5).epsilon(1e-9));
        CHECK(hess[k].xx == doctest::Approx(0.6).epsilon(1e-8));
        CHECK(hess[k].yy == doctest::Approx(2.2).epsilon(1e-8));
        CHECK(hess[k].xy == doctest::Approx(-0.7).epsilon(1e-8));
    }
}

TEST_CASE("coefficient matrix eigenpairs against a symmetric eigensolver") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    std::uniform_real_distribution<double> radius(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = radius(rng), t = angle(rng);
        const Vec2 p{r * std::cos(t), r * std::sin(t)};
        const CoefficientMatrix c = coefficient_matrix(p);
        Eigen::Matrix2d a;
        a << c.a.xx, c.a.xy, c.a.xy, c.a.yy;
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(a).eigenvalues();
        CHECK(std::abs(ev(0) - 1.0) <= 1e-12 * (1 + r * r));
        CHECK(std::abs(ev(1) - (1.0 + r * r)) <= 1e-12 * (1 + r * r));
        CHECK(c.lambda == doctest::Approx(1.0));
        CHECK(c.Lambda == doctest::Approx(1.0 + r * r));
    }
}

TEST_CASE("M in coefficient and Laplacian forms agree") {
    const Grid g = Grid::build(Domain::disk(0.8), 1.0 / 32);
    const ScalarField u = ScalarField::from_function(g, [](Vec2 p) { return std::sin(p.x) * std::exp(p.y); });
    const ScalarField a = apply_M(u);
    const ScalarField b = apply_M_laplacian_form(u);
    for (int id : g.interior_nodes()) CHECK(a.node(id) == doctest::Approx(b.node(id)).epsilon(1e-11).scale(1.0));
}

TEST_CASE("Scherk field is a discrete minimal surface to second order") {
    const Domain sq = Domain::rounded_rect(0.6, 0.6, 0.0);
    const auto scherk = [](Vec2 p) { return std::log(std::cos(p.x) / std::cos(p.y)); };
    CHECK(scherk({0.3, -0.45}) == doctest::Approx(oracle::kScherkAt).epsilon(1e-15));
    double prev = 0.0;
    for (double h : {1.0 / 32, 1.0 / 64}) {
        const ScalarField u = ScalarField::from_function(Grid::build(sq, h), scherk);
        const double r = interior_sup(apply_M(u), 2.0 * h);
        if (prev > 0.0) {
            CHECK(prev / r >= 3.0);
            CHECK(prev / r <= 5.0);
        }
        prev = r;
    }
}

TEST_CASE("Q of the exact cap is small and vanishes with h") {
    const Domain d = Domain::disk(1.0);
    const PrescribedCurvature H = PrescribedCurvature::constant(0.4);
    const auto cap = [](Vec2 p) { return std::sqrt(5.25) - std::sqrt(6.25 - dot(p, p)); };
    CHECK(cap({0.0, 0.0}) == doctest::Approx(oracle::kCapMin).epsilon(1e-14));
    CHECK(cap({0.5, 0.0}) == doctest::Approx(oracle::kCapAtHalf).epsilon(1e-14));
    const double r1 = residual_norm(ScalarField::from_function(Grid::build(d, 1.0 / 16), cap), H, 2);
    const double r2 = residual_norm(ScalarField::from_function(Grid::build(d, 1.0 / 32), cap), H, 2);
    CHECK(r2 < 1e-3);
    CHECK(r1 / r2 > 3.0);
}

TEST_CASE("fields reject non-finite values") {
    const Grid g = Grid::build(Domain::disk(1.0), 0.25);
    ScalarField u(g);
    u.node(g.interior_nodes()[0]) = std::nan("");
    CHECK_THROWS_AS(u.validate("test"), InvalidFieldError);
    const Grid other = Grid::build(Domain::disk(1.0), 0.25);
    CHECK_THROWS_AS(require_same_grid(u, ScalarField(other)), GridMismatchError);
}
