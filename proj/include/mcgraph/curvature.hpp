#pragma once

#include "mcgraph/domain.hpp"
#include "mcgraph/expression.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mcgraph {

/// The prescribed mean curvature H(x) of the graph.
///
/// The sup-norms h0 = sup|H| and h1 = sup||grad H|| over the closure of a
/// domain are computed by bind() and cached on the returned copy.
class PrescribedCurvature {
public:
    enum class Kind { constant, expression, tabulated };

    PrescribedCurvature() = default;

    static PrescribedCurvature constant(double value);
    static PrescribedCurvature expression(Expression e);
    /// Bilinear interpolation of values on a uniform (nx x ny) lattice
    /// spanning `box`, stored row by row (x fastest).
    static PrescribedCurvature tabulated(Box box, int nx, int ny, std::vector<double> values);

    Kind kind() const { return kind_; }
    double operator()(Vec2 x) const;
    /// Analytic gradient for constant and expression kinds, centered
    /// differences of the interpolant for tabulated data.
    Vec2 gradient(Vec2 x) const;
    double constant_value() const { return value_; }
    std::string describe() const;

    /// Copy with h0 and h1 computed over the closure of `domain` (lattice of
    /// about `lattice`^2 interior points plus every boundary sample).
    PrescribedCurvature bind(const Domain& domain, int lattice = 200) const;
    bool bound() const { return h0_.has_value(); }
    double h0() const;
    double h1() const;
    /// ||H||_1 = h0 + h1.
    double c1_norm() const { return h0() + h1(); }

private:
    Kind kind_ = Kind::constant;
    double value_ = 0.0;
    Expression expr_;
    Box box_;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> table_;
    std::optional<double> h0_;
    std::optional<double> h1_;
};

/// Calls f on a square lattice of points of the domain (spacing about
/// diameter / lattice) and on every boundary sample.
template <class F>
void for_each_closure_point(const Domain& domain, int lattice, F&& f) {
    const Box& b = domain.bbox();
    const Vec2 ext = b.extent();
    const double step = std::max(ext.x, ext.y) / lattice;
    for (double y = b.lo.y + 0.5 * step; y < b.hi.y; y += step)
        for (double x = b.lo.x + 0.5 * step; x < b.hi.x; x += step)
            if (domain.contains({x, y})) f(Vec2{x, y});
    for (const BoundarySample& s : domain.boundary_samples()) f(s.point);
}

struct SerrinAudit {
    bool satisfied = false;
    double margin = 0.0;  ///< min over samples of (n-1) kappa - n |H|
    Vec2 worst_point;
    double worst_s = 0.0;
};

SerrinAudit check_serrin(const Domain& domain, const PrescribedCurvature& H, int n);

struct GradientConditionAudit {
    bool satisfied = false;
    double margin = 0.0;  ///< min of n/(n-1) H^2 - ||grad H||
    Vec2 worst_point;
};

GradientConditionAudit check_gradient_condition(const Domain& domain, const PrescribedCurvature& H, int n,
                                                int lattice = 200);

} // namespace mcgraph
