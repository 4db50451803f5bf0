#pragma once

#include "mcgraph/domain.hpp"
#include "mcgraph/expression.hpp"

#include <memory>
#include <string>

namespace mcgraph {

/// C^k norms of boundary data (sum of sup-norms of the partial derivatives up
/// to order k, taken over the closure of the domain).
struct DataNorms {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    bool available = false;  ///< false when the data has no smooth extension
};

/// Dirichlet data phi on the boundary.
///
/// Evaluated at a boundary point together with its arclength coordinate; the
/// bump kind depends on the arclength distance to its centre.
class BoundaryData {
public:
    enum class Kind { zero, expression, bump };

    BoundaryData() = default;

    static BoundaryData zero();
    /// Restriction of a closed-form function of (x, y); the function itself
    /// is the C^2 extension used for the norms.
    static BoundaryData expression(Expression e, std::string label = "expression");
    /// Trace of the Scherk surface log(cos x / cos y).
    static BoundaryData scherk();
    /// eps * exp(1 - 1/(1 - (rho/a)^2)) for rho < a, zero elsewhere, with rho
    /// the boundary arclength distance to the point at arclength s0. The
    /// radius is given through its logarithm so that radii below the smallest
    /// double remain representable.
    static BoundaryData bump(const Domain& domain, double s0, double log_a, double eps);

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    double operator()(Vec2 point, double s) const;
    /// Value of the smooth extension at an arbitrary point (the bump has none
    /// and evaluates via the nearest boundary point).
    double extension(Vec2 x) const;
    /// Second-order jet of the smooth extension; throws for the bump, which
    /// has none.
    Jet2 extension_jet(Vec2 x) const;
    DataNorms norms(const Domain& domain, int lattice = 200) const;

    double bump_eps() const { return eps_; }
    double bump_log_radius() const { return log_a_; }
    double bump_center_s() const { return s0_; }

private:
    Kind kind_ = Kind::zero;
    std::string label_ = "zero";
    Expression expr_;
    // Bump parameters.
    std::shared_ptr<const Domain> domain_;
    double s0_ = 0.0;
    double log_a_ = 0.0;
    double eps_ = 0.0;
};

} // namespace mcgraph
