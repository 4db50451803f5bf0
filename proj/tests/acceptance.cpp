// Acceptance suite. Prints one PASS/FAIL line per criterion and always exits 0;
// ctest only requires that every criterion ran to completion.

#include "mcgraph/config.hpp"
#include "mcgraph/estimates.hpp"
#include "mcgraph/linear.hpp"
#include "mcgraph/operators.hpp"
#include "mcgraph/scenario.hpp"
#include "mcgraph/solver.hpp"
#include "oracle_values.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace mcgraph;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(const char* id, const char* title, double time_limit, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < time_limit, "runtime limit " + std::to_string(time_limit) + " s");
    if (!o.pass) ++failures;
    std::printf("%s %s  %s:%s (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.str().c_str(), secs);
    std::fflush(stdout);
}

const EstimateAudit* find_audit(const ScenarioResult& r, const std::string& name, std::size_t run) {
    std::size_t seen = 0;
    for (const EstimateAudit& a : r.audits)
        if (a.name == name && seen++ == run) return &a;
    return nullptr;
}

const char* kCap = R"(
[domain]
shape = "disk"
radius = 1
[curvature]
value = 0.4
[reference]
name = "cap"
radius = 2.5
rim = 1
[grid]
h = 0.015625, 0.0078125
)";

const char* kScherk = R"(
[domain]
shape = "rounded_rect"
half_x = 0.6
half_y = 0.6
corner_radius = 0
[reference]
name = "scherk"
[boundary]
kind = "scherk"
[grid]
h = 0.015625, 0.0078125
)";

std::string bump_config(double H) {
    std::ostringstream os;
    os << "[domain]\nshape = \"disk\"\nradius = 1\n[curvature]\nvalue = " << H
       << "\n[boundary]\nkind = \"bump\"\ny0 = 1, 0\neps = 0.05\nradius_from_h = 0.55\n"
          "[grid]\nh = 0.015625, 0.0078125\n";
    return os.str();
}

// Shared between the solve criteria and the estimate-compliance check.
std::optional<ScenarioResult> cap_result, scherk_result;

void refinement_checks(Outcome& o, const ScenarioResult& r) {
    o.require(r.runs.size() == 2, "two runs");
    for (const ScenarioRun& run : r.runs)
        o.require(run.solve.report.verdict == Verdict::converged, "converged at h = " + std::to_string(run.h));
    const double e1 = *r.runs[0].reference_error, e2 = *r.runs[1].reference_error;
    const double ratio = e1 / e2;
    o.detail << " error(1/64) = " << e1 << ", error(1/128) = " << e2 << ", ratio " << ratio;
    o.require(e1 <= 5e-3, "error <= 5e-3");
    o.require(ratio >= 3.0 && ratio <= 5.0, "ratio in [3, 5]");
}

} // namespace

int main() {
    std::cout.precision(6);

    criterion("A1", "operator consistency on the Scherk field", 5.0, [](Outcome& o) {
        const Domain sq = Domain::rounded_rect(0.6, 0.6, 0.0);
        const auto scherk = [](Vec2 p) { return std::log(std::cos(p.x) / std::cos(p.y)); };
        double r[2];
        const double hs[2] = {1.0 / 64, 1.0 / 128};
        for (int k = 0; k < 2; ++k)
            r[k] = interior_sup(apply_M(ScalarField::from_function(Grid::build(sq, hs[k]), scherk)), 2.0 * hs[k]);
        const double ratio = r[0] / r[1];
        o.detail << " |Mu| = " << r[0] << " -> " << r[1] << ", ratio " << ratio;
        o.require(ratio >= 3.0 && ratio <= 5.0, "ratio in [3, 5]");
    });

    criterion("A2", "constant-H solve against the spherical cap", 30.0, [](Outcome& o) {
        cap_result = run_scenario(load_scenario(Config::parse(kCap)));
        refinement_checks(o, *cap_result);
        int worst = 0;
        for (const StageSummary& s : cap_result->runs[0].solve.report.stages) worst = std::max(worst, s.iterations);
        o.detail << ", max Picard steps per stage " << worst;
        o.require(worst <= 50, "<= 50 Picard steps per stage");
    });

    criterion("A3", "minimal solve against the Scherk graph", 30.0, [](Outcome& o) {
        scherk_result = run_scenario(load_scenario(Config::parse(kScherk)));
        refinement_checks(o, *scherk_result);
    });

    criterion("A4", "ellipticity of the coefficient matrix", 1.0, [](Outcome& o) {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi), radius(0.0, 10.0);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double r = radius(rng), t = angle(rng);
            const CoefficientMatrix c = coefficient_matrix({r * std::cos(t), r * std::sin(t)});
            Eigen::Matrix2d a;
            a << c.a.xx, c.a.xy, c.a.xy, c.a.yy;
            const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(a).eigenvalues();
            worst = std::max({worst, std::abs(ev(0) - 1.0), std::abs(ev(1) - (1.0 + r * r)) / (1.0 + r * r)});
        }
        o.detail << " max relative eigenvalue error " << worst;
        o.require(worst <= 1e-12, "eigenvalues within 1e-12");
    });

    criterion("A5", "height and global-gradient audits on the converged runs", 1.0, [](Outcome& o) {
        o.require(cap_result && scherk_result, "A2 and A3 results available");
        for (const ScenarioResult* r : {&*cap_result, &*scherk_result})
            for (std::size_t k = 0; k < r->runs.size(); ++k) {
                if (r->runs[k].solve.report.verdict != Verdict::converged) continue;
                for (const char* name : {"height", "global_gradient"}) {
                    const EstimateAudit* a = find_audit(*r, name, k);
                    o.require(a && a->pass, std::string(name) + " audit passes");
                }
            }
        const EstimateAudit* h = find_audit(*cap_result, "height", 0);
        o.detail << " cap sup|u| = " << h->measured << " <= bound " << h->bound;
        o.require(std::abs(h->measured + oracle::kCapMin) < 2e-3, "sup|u| close to 0.209");
        o.require(std::abs(h->bound - oracle::kHeightBoundDiskH04) < 1e-9, "bound matches the closed form");
    });

    criterion("A6", "Serrin audit on the unit disk", 1.0, [](Outcome& o) {
        const Domain disk = Domain::disk(1.0);
        const auto audit = [&](double H) { return check_serrin(disk, PrescribedCurvature::constant(H).bind(disk), 2); };
        const SerrinAudit a = audit(0.5), b = audit(0.45), c = audit(0.55);
        o.detail << " margins " << a.margin << ", " << b.margin << ", " << c.margin;
        o.require(a.satisfied && std::abs(a.margin) <= 1e-9, "H = 0.5 has margin 0");
        o.require(b.satisfied, "H = 0.45 satisfied");
        o.require(!c.satisfied && std::abs(c.margin + 0.1) <= 1e-9, "H = 0.55 violated by 0.1");
    });

    criterion("A7", "barrier properties on the cap problem", 10.0, [](Outcome& o) {
        const Domain disk = Domain::disk(1.0);
        const PrescribedCurvature H = PrescribedCurvature::constant(0.4).bind(disk);
        const Grid g = Grid::build(disk, 1.0 / 64);
        const BarrierCheck hb = height_barrier(g, H, 2, 0.0);
        o.detail << " height barrier max Q = " << hb.max_Q << " on " << hb.checked << " nodes";
        o.require(hb.pass && hb.max_Q <= 0.0, "Q(height barrier) <= 0");

        const ScalarField& u = cap_result ? cap_result->runs[0].solve.u
                                          : solve_dirichlet(g, H, BoundaryData::zero()).u;
        const BoundaryGradientPackage pkg =
            boundary_gradient_package(disk, H, 2, BoundaryData::zero(), u.max_abs(), &u);
        o.detail << "; Q w+ <= " << pkg.max_Q_plus << ", Q w- >= " << pkg.min_Q_minus << ", sandwich on "
                 << pkg.sandwich_nodes << " nodes";
        o.require(pkg.signs_ok, "Q w+ < 0 < Q w-");
        o.require(pkg.sandwich_checked && pkg.sandwich_ok, "w- <= u <= w+ + 1e-6");

        std::mt19937_64 rng(5);
        const Profile psi = boundary_gradient_profile(pkg.params.nu, pkg.params.log_k);
        std::uniform_real_distribution<double> t_dist(1e-9, pkg.params.a);
        double worst = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const ProfileValue p = psi(t_dist(rng));
            worst = std::max(worst, std::abs(pkg.params.nu * p.d1 * p.d1 + p.d2) / std::abs(p.d2));
        }
        const double nu_ne = oracle::kNuNe, a = 0.01, e = 0.0025;
        const Profile phi = nonexistence_phi_profile(nu_ne, a, e);
        std::uniform_real_distribution<double> s_dist(e * 1.001, a);
        for (int k = 0; k < 10000; ++k) {
            const ProfileValue p = phi(s_dist(rng));
            worst = std::max(worst, std::abs(nu_ne * p.d1 * p.d1 * p.d1 + p.d2) / std::abs(p.d2));
        }
        o.detail << "; profile identity residual " << worst;
        o.require(worst <= 1e-12, "profile identities to 1e-12");
    });

    criterion("A8", "non-existence witness beyond the Serrin threshold", 60.0, [](Outcome& o) {
        const Domain disk = Domain::disk(1.0);
        const NonexistenceBound nb = nonexistence_bound(disk, PrescribedCurvature::constant(0.55).bind(disk), 2, 0.0, 0.05);
        o.detail << " log a = " << nb.params.log_a_ne << ", psi(a) + sqrt(2a/nu) = " << nb.total << " (below eps by "
                 << 0.05 - nb.total << ")";
        o.require(std::isfinite(nb.params.log_a_ne) && nb.total < 0.05, "certified radius with total < eps");

        const ScenarioResult hot = run_scenario(load_scenario(Config::parse(bump_config(0.55))));
        o.require(hot.witness.has_value(), "witness evaluated");
        if (hot.witness) {
            o.detail << "; H = 0.55: " << hot.witness->verdict << " (gradient ratio " << hot.witness->gradient_ratio << ")";
            o.require(hot.witness->witness, "WITNESS at H = 0.55");
        }
        const ScenarioResult control = run_scenario(load_scenario(Config::parse(bump_config(0.45))));
        o.require(control.witness.has_value(), "control witness evaluated");
        if (control.witness) {
            o.detail << "; H = 0.45: " << control.witness->verdict << " (gradient ratio "
                     << control.witness->gradient_ratio << ", data error " << control.witness->data_attainment_error
                     << ")";
            o.require(!control.witness->witness, "NO-WITNESS at H = 0.45");
            o.require(control.witness->data_attainment_error <= 5e-3, "control attains the data");
        }
        for (const ScenarioRun& run : control.runs)
            o.require(run.solve.report.verdict == Verdict::converged, "control converged");
    });

    criterion("A9", "comparison on translations and violated hypotheses", 10.0, [](Outcome& o) {
        const Domain ell = Domain::ellipse(1.0, 0.7);
        struct Base {
            PrescribedCurvature H;
            ScalarField u;
        };
        std::vector<Base> bases;
        for (double h : {0.2, 0.4}) {
            const Domain& d = h == 0.2 ? ell : Domain::disk(1.0);
            const PrescribedCurvature H = PrescribedCurvature::constant(h).bind(d);
            const BoundaryData phi = BoundaryData::expression(Expression::parse("0.1*x*y"));
            SolveResult r = solve_dirichlet(Grid::build(d, 1.0 / 32), H, phi);
            o.require(r.report.verdict == Verdict::converged, "base solve converged");
            bases.push_back({H, std::move(r.u)});
        }
        const auto shifted = [](const ScalarField& u, double c) {
            ScalarField v = u;
            for (double& x : v.node_values()) x += c;
            for (double& x : v.foot_values()) x += c;
            return v;
        };
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> c_dist(0.0, 1.0);
        int passed = 0, refused = 0, false_pass = 0;
        for (int k = 0; k < 100; ++k) {
            const Base& b = bases[k % bases.size()];
            const double c = c_dist(rng);
            const ScalarField v = shifted(b.u, c);
            if (comparison_check(b.u, v, b.H, 2, 1e-9).verdict == ComparisonVerdict::pass) ++passed;
            // Reversed pair: u + c <= u fails on the boundary once c > 0.
            if (c > 1e-9) {
                const ComparisonVerdict rv = comparison_check(v, b.u, b.H, 2, 1e-9).verdict;
                if (rv == ComparisonVerdict::not_applicable) ++refused;
                if (rv == ComparisonVerdict::pass) ++false_pass;
            }
        }
        // Different curvatures on one disk: Q_H of the flatter solution is negative.
        const Domain disk = Domain::disk(1.0);
        const Grid g = Grid::build(disk, 1.0 / 32);
        const PrescribedCurvature lo = PrescribedCurvature::constant(0.2).bind(disk);
        const PrescribedCurvature hi = PrescribedCurvature::constant(0.4).bind(disk);
        const ScalarField u_lo = solve_dirichlet(g, lo, BoundaryData::zero()).u;
        const ScalarField u_hi = solve_dirichlet(g, hi, BoundaryData::zero()).u;
        const ComparisonVerdict bad = comparison_check(u_lo, u_hi, hi, 2, 1e-9).verdict;
        const ComparisonVerdict good = comparison_check(u_hi, u_lo, hi, 2, 1e-9).verdict;
        o.detail << " " << passed << "/100 translations pass, " << refused << " reversed pairs not applicable, "
                 << false_pass << " false passes; curvature pair: " << to_string(bad) << " / " << to_string(good);
        o.require(passed == 100, "all translations pass");
        o.require(false_pass == 0, "no false pass");
        o.require(bad == ComparisonVerdict::not_applicable, "violated Q hypothesis is not applicable");
        o.require(good == ComparisonVerdict::pass, "ordered curvature pair passes");
    });

    criterion("A10", "linear subproblem", 5.0, [](Outcome& o) {
        const auto feet_of = [](const Grid& g, const std::function<double(Vec2)>& f) {
            std::vector<double> out;
            for (const BoundaryFoot& foot : g.feet()) out.push_back(f(foot.point));
            return out;
        };
        const auto max_error = [](const ScalarField& u, const std::function<double(Vec2)>& exact) {
            double e = 0.0;
            for (int id : u.grid().interior_nodes()) e = std::max(e, std::abs(u.node(id) - exact(u.grid().position(id))));
            return e;
        };

        const Grid ge = Grid::build(Domain::ellipse(1.0, 0.6, {0.1, -0.2}), 1.0 / 40);
        const ScalarField v = ScalarField::from_function(ge, [](Vec2 p) { return 0.8 * p.x - 0.3 * p.y + 0.5 * p.x * p.y; });
        const auto quad = [](Vec2 p) { return 1.5 * p.x * p.x - 0.4 * p.x * p.y + 0.9 * p.y * p.y + p.x - 2.0; };
        std::vector<double> source;
        for (const Vec2 q : gradient(v)) {
            const Sym2 a = coefficient_matrix(q).a;
            source.push_back(a.xx * 3.0 + 2.0 * a.xy * -0.4 + a.yy * 1.8);
        }
        const double e_manufactured = max_error(solve(assemble_frozen(v, source, feet_of(ge, quad))), quad);

        const Grid gd = Grid::build(Domain::disk(1.0), 1.0 / 32);
        const auto bowl = [](Vec2 p) { return dot(p, p) - 1.0; };
        const double e_poisson = max_error(
            solve(assemble_frozen(ScalarField(gd), std::vector<double>(gd.interior_count(), 4.0), feet_of(gd, bowl))), bowl);

        double overshoot = 0.0;
        for (const Domain& d : {Domain::disk(1.0), Domain::ellipse(1.2, 0.7), Domain::rounded_rect(0.6, 0.4, 0.2)}) {
            const Grid g = Grid::build(d, 1.0 / 32);
            const std::vector<double> feet =
                feet_of(g, [](Vec2 p) { return std::sin(3.0 * p.x) + std::cos(2.0 * p.y) * p.x; });
            const ScalarField u = solve(assemble_frozen(ScalarField(g), std::vector<double>(g.interior_count(), 0.0), feet));
            const double hi = *std::max_element(feet.begin(), feet.end());
            const double lo = *std::min_element(feet.begin(), feet.end());
            for (int id : g.interior_nodes()) overshoot = std::max({overshoot, u.node(id) - hi, lo - u.node(id)});
        }
        o.detail << " manufactured error " << e_manufactured << ", Poisson error " << e_poisson
                 << ", maximum-principle overshoot " << overshoot;
        o.require(e_manufactured <= 1e-8, "manufactured recovery");
        o.require(e_poisson <= 1e-8, "Poisson recovery");
        o.require(overshoot <= 1e-9, "maximum principle");
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return 0;
}
