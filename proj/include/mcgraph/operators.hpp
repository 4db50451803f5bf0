#pragma once

#include "mcgraph/curvature.hpp"
#include "mcgraph/grid.hpp"

#include <vector>

namespace mcgraph {

/// Weights (minus, centre, plus) of the parabola through offsets -m, 0, +p.
struct LineWeights {
    double wm = 0.0;
    double w0 = 0.0;
    double wp = 0.0;
};

inline LineWeights first_derivative_weights(double m, double p) {
    return {-p / (m * (m + p)), (p - m) / (m * p), m / (p * (m + p))};
}

inline LineWeights second_derivative_weights(double m, double p) {
    return {2.0 / (m * (m + p)), -2.0 / (m * p), 2.0 / (p * (m + p))};
}

struct NodeDerivatives {
    Vec2 grad;
    Sym2 hess;
};

/// Gradient and Hessian at interior node `unknown`. Each stencil line is
/// closed by the parabola through its two sides, so boundary feet enter with
/// their true distances; interior nodes away from the boundary get the
/// standard centred stencils.
NodeDerivatives node_derivatives(const ScalarField& u, int unknown);

/// Per interior node (indexed by unknown).
std::vector<Vec2> gradient(const ScalarField& u);
std::vector<Sym2> hessian(const ScalarField& u);

/// Gradient at each boundary foot: the node gradient with its component
/// along the link replaced by the one-sided parabola derivative at the foot.
std::vector<Vec2> boundary_gradient(const ScalarField& u);

struct CoefficientMatrix {
    Sym2 a;              ///< a_ij = W^2 delta_ij - p_i p_j
    double lambda = 1.0; ///< smallest eigenvalue, eigenvector along p
    double Lambda = 1.0; ///< largest eigenvalue 1 + |p|^2, eigenvector along p-perp
    Vec2 v_lambda{1.0, 0.0};
    Vec2 v_Lambda{0.0, 1.0};
};

CoefficientMatrix coefficient_matrix(Vec2 p);

/// M u = sum (W^2 delta_ij - u_i u_j) u_ij at interior nodes (other entries zero).
ScalarField apply_M(const ScalarField& u);
/// The same operator written as W^2 Lap u - <Hess u grad u, grad u>.
ScalarField apply_M_laplacian_form(const ScalarField& u);
/// Q u = M u - tau n H W^3.
ScalarField apply_Q(const ScalarField& u, const PrescribedCurvature& H, int n, double tau = 1.0);

/// sup over interior nodes of |f| (optionally only nodes with d >= min_distance).
double interior_sup(const ScalarField& f, double min_distance = 0.0);

} // namespace mcgraph
