#pragma once

#include "mcgraph/boundary_data.hpp"
#include "mcgraph/domain.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace mcgraph {

enum class NodeClass : std::uint8_t { exterior, interior, ghost };

const char* to_string(NodeClass c);

/// Lattice directions: 0 +x, 1 +y, 2 -x, 3 -y, 4 (+1,+1), 5 (-1,+1), 6 (-1,-1), 7 (+1,-1).
inline constexpr std::array<std::array<int, 2>, 8> kDirections = {
    {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};

/// Point where the link from an interior node towards a non-interior
/// neighbour leaves the domain.
struct BoundaryFoot {
    Vec2 point;
    double s = 0.0;      ///< arclength coordinate of the nearest boundary point
    double theta = 1.0;  ///< fraction of the link inside the domain, in (0, 1]
    int node = -1;       ///< interior node the link starts from
    int direction = 0;   ///< index into kDirections
    int outer = -1;      ///< the non-interior node the link points to
};

/// One side of a stencil line: either a grid node or a boundary foot, at
/// distance `offset` from the centre node along the line.
struct StencilSide {
    int node = -1;
    int foot = -1;
    double offset = 0.0;

    bool is_foot() const { return foot >= 0; }
};

/// Lines through an interior node: x, y, and the diagonals along (1,1) and (1,-1).
struct StencilLine {
    StencilSide minus;
    StencilSide plus;
};

/// Uniform Cartesian lattice x = (i h, j h) covering a domain, with the
/// embedded-boundary data needed by the difference operators.
///
/// Cheap to copy; copies share the same immutable data.
class Grid {
public:
    static Grid build(const Domain& domain, double h);

    double h() const;
    int nx() const;
    int ny() const;
    int node_id(int i, int j) const { return j * nx() + i; }
    int node_i(int id) const { return id % nx(); }
    int node_j(int id) const { return id / nx(); }
    Vec2 position(int id) const;
    Vec2 position(int i, int j) const;
    NodeClass classification(int id) const;
    const Domain& domain() const;

    /// Interior nodes in lexicographic order; the position in this list is
    /// the unknown index used by the linear systems.
    std::span<const int> interior_nodes() const;
    int unknown(int node) const;
    int interior_count() const { return static_cast<int>(interior_nodes().size()); }
    /// Signed distance to the boundary of the interior node with this unknown index.
    double interior_distance(int unknown) const;
    std::span<const int> ghost_nodes() const;
    std::span<const BoundaryFoot> feet() const;
    const std::array<StencilLine, 4>& lines(int unknown) const;
    /// True when a diagonal of this node is cut by the boundary, which makes
    /// its cross-derivative first order.
    bool cross_first_order(int unknown) const;
    int cross_first_order_count() const;

    bool same_as(const Grid& other) const { return data_ == other.data_; }

private:
    struct Data;
    explicit Grid(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
    std::shared_ptr<const Data> data_;
};

/// Nodal values on interior and ghost nodes plus Dirichlet values at every
/// boundary foot.
class ScalarField {
public:
    explicit ScalarField(Grid grid);

    /// Samples f at every interior and ghost node and at every foot.
    static ScalarField from_function(Grid grid, const std::function<double(Vec2)>& f);

    const Grid& grid() const { return grid_; }
    double node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    double& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
    double foot(int k) const { return feet_[static_cast<std::size_t>(k)]; }
    double& foot(int k) { return feet_[static_cast<std::size_t>(k)]; }
    std::vector<double>& node_values() { return nodes_; }
    const std::vector<double>& node_values() const { return nodes_; }
    std::vector<double>& foot_values() { return feet_; }
    const std::vector<double>& foot_values() const { return feet_; }

    /// Value of a stencil side.
    double side(const StencilSide& s) const { return s.is_foot() ? foot(s.foot) : node(s.node); }

    /// Sets every foot to scale * phi.
    void set_boundary(const BoundaryData& phi, double scale = 1.0);
    /// Ghost values by linear extrapolation through the feet (averaged over
    /// the links that reach a ghost). Only used for output.
    void fill_ghosts();
    /// Throws InvalidFieldError when any interior or foot value is not finite.
    void validate(const char* context) const;
    /// sup |u| over interior nodes and feet.
    double max_abs() const;
    double max_abs_interior() const;
    double max_abs_boundary() const;

private:
    Grid grid_;
    std::vector<double> nodes_;
    std::vector<double> feet_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b);

} // namespace mcgraph
