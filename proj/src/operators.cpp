#include "mcgraph/operators.hpp"

#include <sstream>

namespace mcgraph {

namespace {

struct LineDerivatives {
    double d1 = 0.0;
    double d2 = 0.0;
};

LineDerivatives line_derivatives(const ScalarField& u, const StencilLine& line, double f0) {
    const double m = line.minus.offset;
    const double p = line.plus.offset;
    const double fm = u.side(line.minus);
    const double fp = u.side(line.plus);
    const LineWeights a = first_derivative_weights(m, p);
    const LineWeights b = second_derivative_weights(m, p);
    return {a.wm * fm + a.w0 * f0 + a.wp * fp, b.wm * fm + b.w0 * f0 + b.wp * fp};
}

void check_finite(const ScalarField& f, const char* context) {
    for (int id : f.grid().interior_nodes()) {
        if (!std::isfinite(f.node(id))) {
            std::ostringstream os;
            os << context << ": non-finite result at node " << id;
            throw InvalidFieldError(os.str());
        }
    }
}

} // namespace

NodeDerivatives node_derivatives(const ScalarField& u, int unknown) {
    const Grid& g = u.grid();
    const auto& L = g.lines(unknown);
    const double f0 = u.node(g.interior_nodes()[static_cast<std::size_t>(unknown)]);
    const LineDerivatives x = line_derivatives(u, L[0], f0);
    const LineDerivatives y = line_derivatives(u, L[1], f0);
    const LineDerivatives d1 = line_derivatives(u, L[2], f0);
    const LineDerivatives d2 = line_derivatives(u, L[3], f0);
    NodeDerivatives out;
    out.grad = {x.d1, y.d1};
    out.hess = {x.d2, 0.5 * (d1.d2 - d2.d2), y.d2};
    return out;
}

std::vector<Vec2> gradient(const ScalarField& u) {
    u.validate("gradient");
    std::vector<Vec2> out(static_cast<std::size_t>(u.grid().interior_count()));
    for (int k = 0; k < u.grid().interior_count(); ++k) out[static_cast<std::size_t>(k)] = node_derivatives(u, k).grad;
    return out;
}

std::vector<Sym2> hessian(const ScalarField& u) {
    u.validate("hessian");
    std::vector<Sym2> out(static_cast<std::size_t>(u.grid().interior_count()));
    for (int k = 0; k < u.grid().interior_count(); ++k) out[static_cast<std::size_t>(k)] = node_derivatives(u, k).hess;
    return out;
}

std::vector<Vec2> boundary_gradient(const ScalarField& u) {
    u.validate("boundary_gradient");
    const Grid& g = u.grid();
    const auto feet = g.feet();
    std::vector<Vec2> out(feet.size());
    for (std::size_t k = 0; k < feet.size(); ++k) {
        const BoundaryFoot& f = feet[k];
        const int unknown = g.unknown(f.node);
        const Vec2 node_grad = node_derivatives(u, unknown).grad;
        const auto& dir = kDirections[static_cast<std::size_t>(f.direction)];
        const Vec2 e = Vec2{static_cast<double>(dir[0]), static_cast<double>(dir[1])} / std::hypot(dir[0], dir[1]);
        const double len = f.direction < 4 ? g.h() : std::sqrt(2.0) * g.h();
        // Opposite side of the node along the same line.
        const int line = f.direction < 4 ? f.direction % 2 : (f.direction % 2 == 0 ? 2 : 3);
        const StencilLine& L = g.lines(unknown)[static_cast<std::size_t>(line)];
        const bool foot_is_plus = L.plus.foot == static_cast<int>(k);
        const StencilSide& back = foot_is_plus ? L.minus : L.plus;
        // Parabola through (0: foot), (theta len: node), (theta len + back: far side),
        // coordinate increasing into the domain (opposite to e).
        const double t1 = f.theta * len;
        const double t2 = t1 + back.offset;
        const double f0 = u.foot(static_cast<int>(k));
        const double f1 = u.node(f.node);
        const double f2 = u.side(back);
        // Derivative at t = 0 of the interpolant through (0,f0), (t1,f1), (t2,f2).
        const double slope_in = -(t1 + t2) / (t1 * t2) * f0 + t2 / (t1 * (t2 - t1)) * f1 - t1 / (t2 * (t2 - t1)) * f2;
        const double along_e = -slope_in;
        out[k] = node_grad + e * (along_e - dot(node_grad, e));
    }
    return out;
}

CoefficientMatrix coefficient_matrix(Vec2 p) {
    CoefficientMatrix c;
    const double q = dot(p, p);
    c.a = {1.0 + p.y * p.y, -p.x * p.y, 1.0 + p.x * p.x};
    c.lambda = 1.0;
    c.Lambda = 1.0 + q;
    if (q > 0.0) {
        const double r = std::sqrt(q);
        c.v_lambda = p / r;
        c.v_Lambda = perp(p) / r;
    }
    return c;
}

ScalarField apply_M(const ScalarField& u) {
    u.validate("apply_M");
    ScalarField out(u.grid());
    const auto nodes = u.grid().interior_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const NodeDerivatives d = node_derivatives(u, static_cast<int>(k));
        const Sym2 a = coefficient_matrix(d.grad).a;
        out.node(nodes[k]) = a.xx * d.hess.xx + 2.0 * a.xy * d.hess.xy + a.yy * d.hess.yy;
    }
    check_finite(out, "apply_M");
    return out;
}

ScalarField apply_M_laplacian_form(const ScalarField& u) {
    u.validate("apply_M_laplacian_form");
    ScalarField out(u.grid());
    const auto nodes = u.grid().interior_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const NodeDerivatives d = node_derivatives(u, static_cast<int>(k));
        const double W2 = 1.0 + dot(d.grad, d.grad);
        out.node(nodes[k]) = W2 * d.hess.trace() - d.hess.quadratic(d.grad);
    }
    check_finite(out, "apply_M_laplacian_form");
    return out;
}

ScalarField apply_Q(const ScalarField& u, const PrescribedCurvature& H, int n, double tau) {
    u.validate("apply_Q");
    ScalarField out(u.grid());
    const Grid& g = u.grid();
    const auto nodes = g.interior_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const NodeDerivatives d = node_derivatives(u, static_cast<int>(k));
        const Sym2 a = coefficient_matrix(d.grad).a;
        const double W = std::sqrt(1.0 + dot(d.grad, d.grad));
        const double M = a.xx * d.hess.xx + 2.0 * a.xy * d.hess.xy + a.yy * d.hess.yy;
        out.node(nodes[k]) = M - tau * n * H(g.position(nodes[k])) * W * W * W;
    }
    check_finite(out, "apply_Q");
    return out;
}

double interior_sup(const ScalarField& f, double min_distance) {
    const Grid& g = f.grid();
    const auto nodes = g.interior_nodes();
    double m = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (g.interior_distance(static_cast<int>(k)) < min_distance) continue;
        m = std::max(m, std::abs(f.node(nodes[k])));
    }
    return m;
}

} // namespace mcgraph
