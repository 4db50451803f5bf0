#include "mcgraph/catalog.hpp"

#include "mcgraph/grid.hpp"
#include "mcgraph/solver.hpp"

#include <limits>
#include <sstream>

namespace mcgraph {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& p, const std::vector<std::string>& allowed,
                    const std::string& name) {
    for (const auto& [k, _] : p)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw Error("reference '" + name + "' has no parameter '" + k + "'");
}

} // namespace

std::vector<std::string> reference_names() { return {"zero", "scherk", "cap", "catenoid_annulus"}; }

double reference_self_test(const ReferenceSolution& ref) {
    const Domain& d = ref.test_domain;
    const Vec2 ext = d.bbox().extent();
    const double L = 0.5 * std::min(ext.x, ext.y);
    const PrescribedCurvature H = PrescribedCurvature::constant(ref.H);
    double r[2];
    for (int k = 0; k < 2; ++k) {
        const Grid g = Grid::build(d, L / (16 << k));
        const ScalarField u = ScalarField::from_function(g, [&](Vec2 x) { return ref.u(x); });
        r[k] = residual_norm(u, H, 2);
    }
    if (r[1] < 1e-10) return std::numeric_limits<double>::infinity();
    return r[0] / r[1];
}

ReferenceSolution make_reference(const std::string& name, const std::map<std::string, double>& params) {
    ReferenceSolution ref;
    ref.name = name;
    if (name == "zero") {
        reject_unknown(params, {}, name);
        ref.description = "u = 0, H = 0";
        ref.u = Expression::constant(0.0);
        ref.valid = [](Vec2) { return true; };
        ref.natural_domain = Domain::disk(1.0);
        ref.test_domain = Domain::disk(1.0);
    } else if (name == "scherk") {
        reject_unknown(params, {}, name);
        ref.description = "Scherk minimal graph u = log(cos x / cos y), H = 0";
        ref.u = Expression::parse("log(cos(x)/cos(y))");
        ref.valid = [](Vec2 p) { return std::abs(p.x) < 0.5 * kPi && std::abs(p.y) < 0.5 * kPi; };
        ref.natural_domain = Domain::rounded_rect(0.6, 0.6, 0.0);
        ref.test_domain = Domain::disk(0.5);
    } else if (name == "cap") {
        reject_unknown(params, {"radius", "rim"}, name);
        const double R = param(params, "radius", 2.5);
        const double r0 = param(params, "rim", 1.0);
        if (!(R > 0.0 && r0 > 0.0 && r0 <= R)) throw Error("reference 'cap' needs 0 < rim <= radius");
        std::ostringstream os;
        os << "spherical cap u = sqrt(R^2 - r0^2) - sqrt(R^2 - r^2), H = 1/R with R = " << R << ", r0 = " << r0;
        ref.description = os.str();
        ref.u = Expression::parse("sqrt(R*R - r0*r0) - sqrt(R*R - x*x - y*y)", {{"R", R}, {"r0", r0}});
        ref.H = 1.0 / R;
        ref.valid = [R](Vec2 p) { return norm(p) < R; };
        ref.natural_domain = Domain::disk(r0);
        ref.test_domain = Domain::disk(std::min(r0, 0.9 * R));
    } else if (name == "catenoid_annulus") {
        reject_unknown(params, {"neck"}, name);
        const double c = param(params, "neck", 1.0);
        if (!(c > 0.0)) throw Error("reference 'catenoid_annulus' needs a positive neck");
        std::ostringstream os;
        os << "catenoid u = c acosh(r / c), H = 0 with c = " << c;
        ref.description = os.str();
        ref.u = Expression::parse("c*acosh(sqrt(x*x + y*y)/c)", {{"c", c}});
        ref.valid = [c](Vec2 p) { return norm(p) > c; };
        ref.natural_domain =
            Domain::level_set(Expression::parse("(x*x + y*y - a*a)*(x*x + y*y - b*b)", {{"a", 1.5 * c}, {"b", 3.0 * c}}),
                              Box{{-3.5 * c, -3.5 * c}, {3.5 * c, 3.5 * c}});
        ref.test_domain = Domain::disk(0.4 * c, {2.0 * c, 0.0});
    } else {
        throw Error("unknown reference solution '" + name + "'");
    }
    ref.self_test_ratio = reference_self_test(ref);
    if (!(ref.self_test_ratio >= 2.5)) {
        std::ostringstream os;
        os << "reference '" << name << "' failed its self-test: residual ratio " << ref.self_test_ratio
           << " under h -> h/2";
        throw Error(os.str());
    }
    return ref;
}

} // namespace mcgraph
