#include "mcgraph/estimates.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <random>

using namespace mcgraph;

namespace {

const Domain& unit_disk() {
    static const Domain d = Domain::disk(1.0);
    return d;
}

PrescribedCurvature constant_H(double h) { return PrescribedCurvature::constant(h).bind(unit_disk()); }

} // namespace

TEST_CASE("height bound on the unit disk") {
    const EstimateAudit a = height_bound(unit_disk(), constant_H(0.4), 2, 0.0, 0.2087);
    CHECK(a.bound == doctest::Approx(oracle::kHeightBoundDiskH04).epsilon(1e-13));
    CHECK(a.pass);
    const HeightConstants lim = height_constants(unit_disk(), constant_H(0.0), 2);
    CHECK(lim.limit);
    CHECK(height_bound(unit_disk(), constant_H(0.0), 2, 0.1).bound == doctest::Approx(2.1).epsilon(1e-15));
}

TEST_CASE("boundary-gradient constants match closed-form evaluation") {
    const BoundaryGradientPackage p = boundary_gradient_package(unit_disk(), constant_H(0.4), 2, BoundaryData::zero(), 0.21);
    CHECK(p.params.tau == 1.0);
    CHECK(p.params.d_c2 == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(p.params.C == doctest::Approx(oracle::kPkgC).epsilon(1e-12));
    CHECK(p.params.nu == doctest::Approx(oracle::kPkgNu).epsilon(1e-12));
    CHECK(p.params.log_k == doctest::Approx(oracle::kPkgLogK).epsilon(1e-12));
    CHECK(p.params.a == doctest::Approx(oracle::kPkgA).epsilon(1e-12));
    CHECK(p.params.psi_prime0 == doctest::Approx(oracle::kPkgPsiPrime0).epsilon(1e-11));
    CHECK(p.constants_ok);
    CHECK(p.signs_ok);
    CHECK(p.max_Q_plus < 0.0);
    CHECK(p.min_Q_minus > 0.0);
}

TEST_CASE("boundary-gradient package refuses beyond the Serrin threshold") {
    CHECK_THROWS_AS(boundary_gradient_package(unit_disk(), constant_H(0.55), 2, BoundaryData::zero(), 0.3), RefusedError);
    CHECK_THROWS_WITH(boundary_gradient_package(unit_disk(), constant_H(0.55), 2, BoundaryData::zero(), 0.3),
                      doctest::Contains("Serrin condition"));
}

TEST_CASE("profile identities hold at 10^4 points") {
    std::mt19937_64 rng(11);
    const double nu = 61.6, log_k = 17.05;
    const Profile psi = boundary_gradient_profile(nu, log_k);
    std::uniform_real_distribution<double> t_dist(1e-9, 0.016);
    for (int k = 0; k < 10000; ++k) {
        const ProfileValue p = psi(t_dist(rng));
        CHECK(std::abs(nu * p.d1 * p.d1 + p.d2) <= 1e-12 * std::abs(p.d2));
    }
    const double nu_ne = 0.0125, a = 0.01, e = 0.0025;
    const Profile phi = nonexistence_phi_profile(nu_ne, a, e);
    std::uniform_real_distribution<double> s_dist(e * 1.001, a);
    for (int k = 0; k < 10000; ++k) {
        const ProfileValue p = phi(s_dist(rng));
        CHECK(std::abs(nu_ne * p.d1 * p.d1 * p.d1 + p.d2) <= 1e-12 * std::abs(p.d2));
    }
    CHECK(phi(a).v == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("non-existence profile against high-precision quadrature") {
    CHECK(nonexistence_psi(0.5, -3200.307087, 2.0, 2) == doctest::Approx(oracle::kPsiNe1).epsilon(1e-10));
    CHECK(nonexistence_psi(0.3, -5.0, 1.0, 2) == doctest::Approx(oracle::kPsiNe2).epsilon(1e-10));
    CHECK(nonexistence_psi(0.2, -3.0, 1.5, 3) == doctest::Approx(oracle::kPsiNe3).epsilon(1e-10));
    CHECK(nonexistence_psi(1.5, -3.0, 1.5, 3) == 0.0);
    const Profile p = nonexistence_psi_profile(-5.0, 1.0, 2);
    const double t = 0.3;
    CHECK(p(t).d1 == doctest::Approx(-std::sqrt(2.0) / std::sqrt(std::log(t) + 5.0)).epsilon(1e-13));
}

TEST_CASE("non-existence bound at H = 0.55 on the unit disk") {
    const NonexistenceBound nb = nonexistence_bound(unit_disk(), constant_H(0.55), 2, 0.0, 0.05);
    CHECK(nb.params.nu_ne == doctest::Approx(oracle::kNuNe).epsilon(1e-14));
    CHECK(nb.params.kappa_S == doctest::Approx(oracle::kKappaS).epsilon(1e-14));
    CHECK(nb.params.log_a_ne <= oracle::kLogAStar);
    CHECK(nb.params.log_a_ne >= oracle::kLogAStar - 1e-6);
    CHECK(nb.total < 0.05);
    CHECK(nb.S_inside);
    CHECK(nb.step1_max_Q < 0.0);
    CHECK(nb.step2_max_Q < 0.0);
    CHECK(nb.min_key_inequality > 0.0);
    CHECK(nb.y0.x == doctest::Approx(1.0));
    CHECK_THROWS_AS(nonexistence_bound(unit_disk(), constant_H(0.5), 2, 0.0, 0.05), NotApplicableError);
}

TEST_CASE("height barrier is a supersolution on the cap problem") {
    const Grid g = Grid::build(unit_disk(), 1.0 / 32);
    const BarrierCheck b = height_barrier(g, constant_H(0.4), 2, 0.0);
    CHECK(b.pass);
    CHECK(b.max_Q < 0.0);
    CHECK(b.checked + b.excluded == g.interior_count());
}

TEST_CASE("comparison on translations and on violated hypotheses") {
    const Grid g = Grid::build(unit_disk(), 1.0 / 16);
    const PrescribedCurvature H = constant_H(0.4);
    const SolveResult r = solve_dirichlet(g, H, BoundaryData::zero());
    REQUIRE(r.report.verdict == Verdict::converged);
    ScalarField up = r.u;
    for (double& v : up.node_values()) v += 0.3;
    for (double& v : up.foot_values()) v += 0.3;
    CHECK(comparison_check(r.u, up, H, 2, 1e-9).verdict == ComparisonVerdict::pass);
    // Reversed order: boundary hypothesis fails, so no verdict is possible.
    CHECK(comparison_check(up, r.u, H, 2, 1e-9).verdict == ComparisonVerdict::not_applicable);
    CHECK(std::string(to_string(ComparisonVerdict::not_applicable)) == "not_applicable");
}

TEST_CASE("witness needs two refinements") {
    const Grid g = Grid::build(unit_disk(), 0.25);
    WitnessSetup s;
    s.y0 = {1.0, 0.0};
    s.log_a = -10.0;
    s.eps = 0.05;
    const BoundaryData phi = adversarial_boundary_data(unit_disk(), 0.0, -10.0, 0.05);
    const std::vector<AdversarialRun> one{{SolveReport{}, ScalarField(g)}};
    CHECK_THROWS_AS(nonexistence_witness(one, s, phi), InsufficientRefinementsError);
}

TEST_CASE("adversarial data is eps at y0 and vanishes away from it") {
    const BoundaryData phi = adversarial_boundary_data(unit_disk(), 0.0, std::log(0.1), 0.05);
    CHECK(phi({1.0, 0.0}, 0.0) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(phi({0.0, 1.0}, 0.5 * kPi) == 0.0);
    CHECK(phi(unit_disk().boundary_at(0.05).point, 0.05) > 0.0);
    CHECK_FALSE(phi.norms(unit_disk()).available);
}
