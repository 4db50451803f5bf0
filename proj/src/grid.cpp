#include "mcgraph/grid.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <sstream>

namespace mcgraph {

const char* to_string(NodeClass c) {
    switch (c) {
    case NodeClass::exterior: return "exterior";
    case NodeClass::interior: return "interior";
    case NodeClass::ghost: return "ghost";
    }
    return "?";
}

struct Grid::Data {
    Domain domain;
    double h = 0.0;
    int i0 = 0;  // lattice index of column 0
    int j0 = 0;
    int nx = 0;
    int ny = 0;
    std::vector<NodeClass> cls;
    std::vector<int> interior;
    std::vector<double> interior_distance;
    std::vector<double> distance;
    std::vector<int> unknown;
    std::vector<int> ghosts;
    std::vector<BoundaryFoot> feet;
    std::vector<std::array<StencilLine, 4>> lines;
    std::vector<char> cross_first_order;
    int cross_first_order_count = 0;

    explicit Data(Domain d) : domain(std::move(d)) {}
    Vec2 position(int i, int j) const { return {(i0 + i) * h, (j0 + j) * h}; }
};

Grid Grid::build(const Domain& domain, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw AssemblyError("grid spacing must be positive");
    auto d = std::make_shared<Data>(domain);
    d->h = h;
    const Box& b = domain.bbox();
    d->i0 = static_cast<int>(std::floor(b.lo.x / h)) - 2;
    d->j0 = static_cast<int>(std::floor(b.lo.y / h)) - 2;
    d->nx = static_cast<int>(std::ceil(b.hi.x / h)) + 2 - d->i0 + 1;
    d->ny = static_cast<int>(std::ceil(b.hi.y / h)) + 2 - d->j0 + 1;
    const long total = static_cast<long>(d->nx) * d->ny;
    if (total > 50'000'000) throw AssemblyError("grid too large");

    const int nx = d->nx;
    const int ny = d->ny;
    d->cls.assign(static_cast<std::size_t>(total), NodeClass::exterior);
    d->distance.assign(static_cast<std::size_t>(total), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Vec2 p = d->position(i, j);
            if (domain.inside_function(p) <= 0.0) continue;
            const double sd = domain.signed_distance(p);
            d->distance[static_cast<std::size_t>(j) * nx + i] = sd;
            if (sd > 1e-9 * h) d->cls[static_cast<std::size_t>(j) * nx + i] = NodeClass::interior;
        }

    d->unknown.assign(static_cast<std::size_t>(total), -1);
    for (int id = 0; id < total; ++id) {
        if (d->cls[id] != NodeClass::interior) continue;
        d->unknown[id] = static_cast<int>(d->interior.size());
        d->interior.push_back(id);
        d->interior_distance.push_back(d->distance[static_cast<std::size_t>(id)]);
    }
    d->distance.clear();
    d->distance.shrink_to_fit();
    if (d->interior.empty()) throw AssemblyError("grid has no interior nodes: spacing too coarse for the domain");

    // Ghosts: non-interior nodes in the 8-neighbourhood of an interior node.
    for (int id : d->interior) {
        const int i = id % nx;
        const int j = id / nx;
        for (const auto& dir : kDirections) {
            const int nid = (j + dir[1]) * nx + (i + dir[0]);
            if (d->cls[nid] == NodeClass::exterior) d->cls[nid] = NodeClass::ghost;
        }
    }
    for (int id = 0; id < total; ++id)
        if (d->cls[id] == NodeClass::ghost) d->ghosts.push_back(id);

    // Feet and stencil lines.
    const double diag = std::sqrt(2.0) * h;
    d->lines.resize(d->interior.size());
    d->cross_first_order.assign(d->interior.size(), 0);
    for (std::size_t k = 0; k < d->interior.size(); ++k) {
        const int id = d->interior[k];
        const int i = id % nx;
        const int j = id / nx;
        const Vec2 p = d->position(i, j);
        std::array<StencilSide, 8> sides;
        for (int dir = 0; dir < 8; ++dir) {
            const int ni = i + kDirections[dir][0];
            const int nj = j + kDirections[dir][1];
            const int nid = nj * nx + ni;
            const double len = dir < 4 ? h : diag;
            if (d->cls[nid] == NodeClass::interior) {
                sides[dir] = {nid, -1, len};
                continue;
            }
            const Vec2 q = d->position(ni, nj);
            auto f = [&](double t) { return domain.inside_function(p + (q - p) * t); };
            double theta = 1.0;
            if (f(1.0) < 0.0) {
                std::uintmax_t iters = 200;
                auto r = boost::math::tools::toms748_solve(f, 0.0, 1.0, boost::math::tools::eps_tolerance<double>(52),
                                                           iters);
                theta = 0.5 * (r.first + r.second);
                if (!(theta > 0.0)) theta = r.second;
            }
            BoundaryFoot foot;
            foot.point = p + (q - p) * theta;
            foot.s = domain.nearest_boundary(foot.point).s;
            foot.theta = theta;
            foot.node = id;
            foot.direction = dir;
            foot.outer = nid;
            sides[dir] = {-1, static_cast<int>(d->feet.size()), theta * len};
            d->feet.push_back(foot);
        }
        auto& L = d->lines[k];
        L[0] = {sides[2], sides[0]};
        L[1] = {sides[3], sides[1]};
        L[2] = {sides[6], sides[4]};
        L[3] = {sides[5], sides[7]};
        const bool cut = sides[4].is_foot() || sides[5].is_foot() || sides[6].is_foot() || sides[7].is_foot();
        d->cross_first_order[k] = cut ? 1 : 0;
        d->cross_first_order_count += cut ? 1 : 0;
    }
    return Grid(d);
}

double Grid::h() const { return data_->h; }
int Grid::nx() const { return data_->nx; }
int Grid::ny() const { return data_->ny; }
Vec2 Grid::position(int id) const { return data_->position(id % data_->nx, id / data_->nx); }
Vec2 Grid::position(int i, int j) const { return data_->position(i, j); }
NodeClass Grid::classification(int id) const { return data_->cls[static_cast<std::size_t>(id)]; }
const Domain& Grid::domain() const { return data_->domain; }
std::span<const int> Grid::interior_nodes() const { return data_->interior; }
double Grid::interior_distance(int unknown) const {
    return data_->interior_distance[static_cast<std::size_t>(unknown)];
}
int Grid::unknown(int node) const { return data_->unknown[static_cast<std::size_t>(node)]; }
std::span<const int> Grid::ghost_nodes() const { return data_->ghosts; }
std::span<const BoundaryFoot> Grid::feet() const { return data_->feet; }
const std::array<StencilLine, 4>& Grid::lines(int unknown) const { return data_->lines[static_cast<std::size_t>(unknown)]; }
bool Grid::cross_first_order(int unknown) const { return data_->cross_first_order[static_cast<std::size_t>(unknown)] != 0; }
int Grid::cross_first_order_count() const { return data_->cross_first_order_count; }

// ----------------------------------------------------------------------------

ScalarField::ScalarField(Grid grid)
    : grid_(std::move(grid)),
      nodes_(static_cast<std::size_t>(grid_.nx()) * grid_.ny(), 0.0),
      feet_(grid_.feet().size(), 0.0) {}

ScalarField ScalarField::from_function(Grid grid, const std::function<double(Vec2)>& f) {
    ScalarField u(std::move(grid));
    const Grid& g = u.grid();
    for (int id : g.interior_nodes()) u.node(id) = f(g.position(id));
    for (int id : g.ghost_nodes()) u.node(id) = f(g.position(id));
    const auto feet = g.feet();
    for (std::size_t k = 0; k < feet.size(); ++k) u.feet_[k] = f(feet[k].point);
    return u;
}

void ScalarField::set_boundary(const BoundaryData& phi, double scale) {
    const auto feet = grid_.feet();
    for (std::size_t k = 0; k < feet.size(); ++k) feet_[k] = scale * phi(feet[k].point, feet[k].s);
}

void ScalarField::fill_ghosts() {
    std::vector<double> sum(nodes_.size(), 0.0);
    std::vector<int> count(nodes_.size(), 0);
    const auto feet = grid_.feet();
    for (std::size_t k = 0; k < feet.size(); ++k) {
        const BoundaryFoot& f = feet[k];
        const double up = nodes_[static_cast<std::size_t>(f.node)];
        sum[static_cast<std::size_t>(f.outer)] += up + (feet_[k] - up) / f.theta;
        ++count[static_cast<std::size_t>(f.outer)];
    }
    for (int id : grid_.ghost_nodes())
        if (count[static_cast<std::size_t>(id)] > 0) nodes_[static_cast<std::size_t>(id)] = sum[id] / count[id];
}

void ScalarField::validate(const char* context) const {
    for (int id : grid_.interior_nodes()) {
        if (!std::isfinite(nodes_[static_cast<std::size_t>(id)])) {
            std::ostringstream os;
            os << context << ": non-finite value at node " << id;
            throw InvalidFieldError(os.str());
        }
    }
    for (std::size_t k = 0; k < feet_.size(); ++k) {
        if (!std::isfinite(feet_[k])) {
            std::ostringstream os;
            os << context << ": non-finite boundary value at foot " << k;
            throw InvalidFieldError(os.str());
        }
    }
}

double ScalarField::max_abs_interior() const {
    double m = 0.0;
    for (int id : grid_.interior_nodes()) m = std::max(m, std::abs(nodes_[static_cast<std::size_t>(id)]));
    return m;
}

double ScalarField::max_abs_boundary() const {
    double m = 0.0;
    for (double v : feet_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::max_abs() const { return std::max(max_abs_interior(), max_abs_boundary()); }

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!a.grid().same_as(b.grid())) throw GridMismatchError("fields live on different grids");
}

} // namespace mcgraph
