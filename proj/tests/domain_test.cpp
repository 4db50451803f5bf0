#include "mcgraph/curvature.hpp"
#include "mcgraph/domain.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

using namespace mcgraph;

TEST_CASE("disk geometry") {
    const Domain d = Domain::disk(1.0);
    CHECK(d.perimeter() == doctest::Approx(2 * kPi).epsilon(1e-14));
    CHECK(d.diameter() == 2.0);
    CHECK(d.smoothness_radius() == 1.0);
    CHECK(d.signed_distance({0.25, 0.0}) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(d.signed_distance({2.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-14));
    for (const BoundarySample& b : d.boundary_samples()) {
        CHECK(b.curvature == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(norm(b.point) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(dot(b.normal, b.point) == doctest::Approx(-1.0).epsilon(1e-14));
    }
}

TEST_CASE("ellipse curvature extremes and focal radius") {
    const Domain e = Domain::ellipse(2.0, 1.0);
    CHECK(e.perimeter() == doctest::Approx(oracle::kEllipsePerimeter).epsilon(1e-10));
    double kmax = 0.0, kmin = 1e9;
    for (const BoundarySample& b : e.boundary_samples()) {
        kmax = std::max(kmax, b.curvature);
        kmin = std::min(kmin, b.curvature);
    }
    CHECK(kmax == doctest::Approx(oracle::kEllipseKappaMax).epsilon(1e-9));
    CHECK(kmin == doctest::Approx(oracle::kEllipseKappaMin).epsilon(1e-9));
    CHECK(e.smoothness_radius() == doctest::Approx(oracle::kEllipseFocal).epsilon(1e-12));
    CHECK(e.sampled_smoothness_radius() == doctest::Approx(oracle::kEllipseFocal).epsilon(1e-3));
    CHECK(e.nearest_boundary({1.9, 0.0}).point.x == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("parallel curvature follows kappa / (1 - t kappa)") {
    const Domain e = Domain::ellipse(2.0, 1.0);
    for (double s : {0.0, 0.7, 1.9, 3.3}) {
        const double k = e.boundary_curvature(s);
        for (double t : {0.0, 0.1, 0.3, 0.45})
            CHECK(e.parallel_curvature(s, t) == doctest::Approx(k / (1.0 - t * k)).epsilon(1e-13));
    }
    // The vertex (2, 0) has its focal point at distance 1/2.
    CHECK_THROWS_AS(e.parallel_curvature(0.0, 0.5), FocalPointError);
}

TEST_CASE("distance jet matches the parallel-curve Laplacian") {
    const Domain d = Domain::disk(1.0);
    const DistanceJet j = d.distance_jet({0.0, 0.6});
    REQUIRE(j.valid);
    CHECK(j.d == doctest::Approx(0.4).epsilon(1e-13));
    CHECK(norm(j.grad) == doctest::Approx(1.0).epsilon(1e-13));
    // Delta d = -(n-1) kappa_t with kappa_t = 1 / 0.6 for n = 2.
    CHECK(j.laplacian() == doctest::Approx(-1.0 / 0.6).epsilon(1e-12));
    CHECK_FALSE(d.distance_jet({0.0, 0.0}).valid);
}

TEST_CASE("rounded rectangle with sharp corners") {
    const Domain r = Domain::rounded_rect(0.6, 0.6, 0.0);
    CHECK(r.perimeter() == doctest::Approx(4.8).epsilon(1e-14));
    CHECK(r.signed_distance({0.0, 0.0}) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(r.signed_distance({0.5, 0.1}) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(r.contains({0.59, 0.59}));
    CHECK_FALSE(r.contains({0.61, 0.0}));
}

TEST_CASE("dumbbell neck is reentrant") {
    const Domain d = Domain::dumbbell(-2.0);
    double kmin = 1e9;
    for (const BoundarySample& b : d.boundary_samples()) kmin = std::min(kmin, b.curvature);
    CHECK(kmin == doctest::Approx(-2.0).epsilon(1e-3));
    CHECK(d.contains({1.0, 0.0}));
    CHECK(d.contains({-1.0, 0.0}));
}

TEST_CASE("level set annulus has two boundary components") {
    const Domain a = Domain::level_set(Expression::parse("(x*x + y*y - 1)*(x*x + y*y - 4)"), Box{{-2.5, -2.5}, {2.5, 2.5}});
    CHECK(a.perimeter() == doctest::Approx(6 * kPi).epsilon(1e-5));
    CHECK(a.contains({1.5, 0.0}));
    CHECK_FALSE(a.contains({0.0, 0.0}));
    CHECK(a.signed_distance({1.2, 0.0}) == doctest::Approx(0.2).epsilon(1e-9));
    // Inner circle: concave, curvature -1; outer circle curvature 1/2.
    const BoundarySample inner = a.nearest_boundary({1.1, 0.0});
    const BoundarySample outer = a.nearest_boundary({1.9, 0.0});
    CHECK(inner.curvature == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(outer.curvature == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(a.arclength_distance(inner.s, outer.s) == std::numeric_limits<double>::infinity());
}

TEST_CASE("malformed domains are rejected") {
    CHECK_THROWS_AS(Domain::disk(-1.0), MalformedDomainError);
    CHECK_THROWS_AS(Domain::ellipse(1.0, 0.0), MalformedDomainError);
    CHECK_THROWS_AS(Domain::rounded_rect(1.0, 1.0, 2.0), MalformedDomainError);
    CHECK_THROWS_AS(Domain::level_set(Expression::parse("x*x + y*y + 1"), Box{{-1, -1}, {1, 1}}), MalformedDomainError);
}

TEST_CASE("Serrin margins on the unit disk") {
    const Domain d = Domain::disk(1.0);
    const auto margin = [&](double H) { return check_serrin(d, PrescribedCurvature::constant(H).bind(d), 2); };
    CHECK(std::abs(margin(0.5).margin) <= 1e-9);
    CHECK(margin(0.5).satisfied);
    CHECK(margin(0.45).satisfied);
    const SerrinAudit bad = margin(0.55);
    CHECK_FALSE(bad.satisfied);
    CHECK(bad.margin == doctest::Approx(-0.1).epsilon(1e-9));
}

TEST_CASE("Serrin margin on the ellipse sits at the flat vertex") {
    const Domain e = Domain::ellipse(2.0, 1.0);
    const SerrinAudit a = check_serrin(e, PrescribedCurvature::constant(0.1).bind(e), 2);
    CHECK(a.margin == doctest::Approx(oracle::kEllipseKappaMin - 0.2).epsilon(1e-9));
    CHECK(std::abs(a.worst_point.x) == doctest::Approx(0.0).epsilon(1e-2));
    CHECK(std::abs(a.worst_point.y) == doctest::Approx(1.0).epsilon(1e-6));
}
