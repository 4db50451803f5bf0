#include "mcgraph/boundary_data.hpp"

#include "mcgraph/curvature.hpp"

#include <limits>

namespace mcgraph {

BoundaryData BoundaryData::zero() { return {}; }

BoundaryData BoundaryData::expression(Expression e, std::string label) {
    BoundaryData d;
    d.kind_ = Kind::expression;
    d.expr_ = std::move(e);
    d.label_ = std::move(label);
    return d;
}

BoundaryData BoundaryData::scherk() { return expression(Expression::parse("log(cos(x)/cos(y))"), "scherk"); }

BoundaryData BoundaryData::bump(const Domain& domain, double s0, double log_a, double eps) {
    if (!(eps > 0.0)) throw Error("bump height must be positive");
    if (!std::isfinite(log_a)) throw Error("bump radius must be positive and finite");
    BoundaryData d;
    d.kind_ = Kind::bump;
    d.label_ = "bump";
    d.domain_ = std::make_shared<const Domain>(domain);
    d.s0_ = s0;
    d.log_a_ = log_a;
    d.eps_ = eps;
    return d;
}

double BoundaryData::operator()(Vec2 point, double s) const {
    switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::expression: return expr_(point);
    case Kind::bump: {
        const double rho = domain_->arclength_distance(s, s0_);
        if (rho == 0.0) return eps_;
        const double q = std::log(rho) - log_a_;  // log(rho / a)
        if (q >= 0.0) return 0.0;
        const double r2 = std::exp(2.0 * q);
        return eps_ * std::exp(1.0 - 1.0 / (1.0 - r2));
    }
    }
    return 0.0;
}

double BoundaryData::extension(Vec2 x) const {
    switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::expression: return expr_(x);
    case Kind::bump: {
        const BoundarySample b = domain_->nearest_boundary(x);
        return (*this)(b.point, b.s);
    }
    }
    return 0.0;
}

Jet2 BoundaryData::extension_jet(Vec2 x) const {
    switch (kind_) {
    case Kind::zero: return Jet2(0.0);
    case Kind::expression: return expr_.jet(x);
    case Kind::bump: break;
    }
    throw RefusedError("bump boundary data has no C^2 extension");
}

DataNorms BoundaryData::norms(const Domain& domain, int lattice) const {
    DataNorms out;
    switch (kind_) {
    case Kind::zero: out.available = true; return out;
    case Kind::bump:
        out.c0 = eps_;
        out.c1 = out.c2 = std::numeric_limits<double>::infinity();
        return out;
    case Kind::expression: break;
    }
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for_each_closure_point(domain, lattice, [&](Vec2 p) {
        const Jet2 j = expr_.jet(p);
        s0 = std::max(s0, std::abs(j.v));
        s1 = std::max({s1, std::abs(j.g.x), std::abs(j.g.y)});
        s2 = std::max(s2, j.h.max_abs_entry());
    });
    out.c0 = s0;
    out.c1 = s0 + s1;
    out.c2 = s0 + s1 + s2;
    out.available = std::isfinite(out.c2);
    return out;
}

} // namespace mcgraph
