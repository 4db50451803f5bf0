#pragma once

#include "mcgraph/common.hpp"
#include "mcgraph/expression.hpp"

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mcgraph {

inline constexpr int kDefaultBoundarySamples = 4096;

struct DiskShape {
    Vec2 center;
    double radius = 1.0;
};

/// Axis-aligned ellipse with semi-axes a (along x) and b (along y).
struct EllipseShape {
    Vec2 center;
    double a = 1.0;
    double b = 1.0;
};

/// Rectangle with half-widths (half_x, half_y) whose corners are rounded with
/// the given radius. A zero radius gives the plain rectangle.
struct RoundedRectShape {
    Vec2 center;
    double half_x = 1.0;
    double half_y = 1.0;
    double corner_radius = 0.0;
};

/// Domain {g < 0} of a level-set expression g, searched inside `bbox`.
struct LevelSetShape {
    Expression g;
    Box bbox;
    std::string label = "levelset";
};

using ShapeDescriptor = std::variant<DiskShape, EllipseShape, RoundedRectShape, LevelSetShape>;

/// Boundary point with inner unit normal and curvature. The curvature is
/// positive where the domain is locally convex (the unit disk has +1).
struct BoundarySample {
    Vec2 point;
    Vec2 normal;
    double curvature = 0.0;
    double s = 0.0;  ///< arclength coordinate
    int component = 0;
};

/// Distance to the boundary together with its first and second derivatives.
/// `valid` is false where the distance is not C^2 (beyond the focal or
/// medial-axis clearance).
struct DistanceJet {
    double d = 0.0;
    Vec2 grad;
    Sym2 hess;
    bool valid = false;

    double laplacian() const { return hess.trace(); }
};

/// Bounded planar domain with a C^2 boundary (corners are tolerated by the
/// rectangle shape but its curvature-based audits are then meaningless).
///
/// Immutable after construction and cheap to copy.
class Domain {
public:
    static Domain disk(double radius, Vec2 center = {}, int samples = kDefaultBoundarySamples);
    static Domain ellipse(double a, double b, Vec2 center = {}, int samples = kDefaultBoundarySamples);
    static Domain rounded_rect(double half_x, double half_y, double corner_radius, Vec2 center = {},
                               int samples = kDefaultBoundarySamples);
    /// Cassini-oval dumbbell with focal half-distance 1, shaped so that the
    /// boundary curvature at the neck equals `neck_curvature` (< 0 gives a
    /// reentrant neck).
    static Domain dumbbell(double neck_curvature = -2.0, int samples = kDefaultBoundarySamples);
    static Domain level_set(const Expression& g, Box bbox, int samples = kDefaultBoundarySamples,
                            std::string label = "levelset");

    const ShapeDescriptor& shape() const;
    std::string name() const;
    const Box& bbox() const;
    std::span<const BoundarySample> boundary_samples() const;
    double perimeter() const;

    /// Positive inside, negative outside, zero on the boundary.
    double signed_distance(Vec2 x) const;
    /// Cheap function with the sign and zero set of signed_distance, used for
    /// root finding along grid links.
    double inside_function(Vec2 x) const;
    /// Nearest boundary point of x (any point of the plane).
    BoundarySample nearest_boundary(Vec2 x) const;
    /// Boundary point at arclength s (taken modulo the perimeter).
    BoundarySample boundary_at(double s) const;
    double boundary_curvature(double s) const;
    /// Curvature of the parallel curve at inner distance t from the boundary
    /// point at arclength s: kappa / (1 - t kappa). Throws FocalPointError when
    /// 1 - t kappa <= 0.
    double parallel_curvature(double s, double t) const;
    /// Width of the inner strip on which the distance function is C^2.
    double smoothness_radius() const;
    /// Smoothness radius from sampling alone (focal distances and medial-axis
    /// clearance along inner normals); equals smoothness_radius() except for
    /// shapes where that one is analytic.
    double sampled_smoothness_radius() const;
    double diameter() const;
    DistanceJet distance_jet(Vec2 x) const;
    /// Distance along the boundary between two arclength coordinates; infinite
    /// when they lie on different boundary components.
    double arclength_distance(double s1, double s2) const;
    bool contains(Vec2 x) const { return inside_function(x) > 0.0; }

private:
    struct Data;
    explicit Domain(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    std::shared_ptr<const Data> data_;
};

// Free-function forms of the geometric operations.
inline double signed_distance(const Domain& d, Vec2 x) { return d.signed_distance(x); }
inline double boundary_curvature(const Domain& d, double s) { return d.boundary_curvature(s); }
inline double parallel_curvature(const Domain& d, double s, double t) { return d.parallel_curvature(s, t); }
inline double smoothness_radius(const Domain& d) { return d.smoothness_radius(); }

} // namespace mcgraph
