#pragma once

#include "mcgraph/boundary_data.hpp"
#include "mcgraph/curvature.hpp"
#include "mcgraph/domain.hpp"
#include "mcgraph/expression.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mcgraph {

/// Exact solution of the prescribed mean curvature equation with constant H,
/// used to measure discretisation errors.
struct ReferenceSolution {
    std::string name;
    std::string description;
    Expression u;
    double H = 0.0;
    std::function<bool(Vec2)> valid;  ///< where the closed form is defined and smooth
    Domain natural_domain = Domain::disk(1.0);  ///< domain on which the solution is usually posed
    Domain test_domain = Domain::disk(1.0);     ///< small domain used by the load-time self-test
    double self_test_ratio = 0.0;     ///< residual ratio under h -> h/2 found at load

    PrescribedCurvature curvature() const { return PrescribedCurvature::constant(H); }
    BoundaryData trace() const { return BoundaryData::expression(u, name); }
};

/// Names accepted by make_reference: zero, scherk, cap, catenoid_annulus.
std::vector<std::string> reference_names();

/// Builds a catalog entry. Parameters: cap takes `radius` (sphere radius R,
/// default 2.5) and `rim` (radius where u = 0, default 1); catenoid_annulus
/// takes `neck` (default 1). Every entry is self-tested on construction: the
/// discrete Q of the exact field must decay at second order, otherwise Error
/// is thrown.
ReferenceSolution make_reference(const std::string& name, const std::map<std::string, double>& params = {});

/// Self-test: residual of the exact field at two spacings on the test domain.
/// Returns the ratio (infinity when both residuals are at round-off level).
double reference_self_test(const ReferenceSolution& ref);

} // namespace mcgraph
