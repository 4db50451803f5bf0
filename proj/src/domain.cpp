#include "mcgraph/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace mcgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform bucket grid over boundary samples for nearest-sample queries.
class SampleBuckets {
public:
    void build(std::span<const BoundarySample> samples, Box box, double cell) {
        cell_ = cell;
        origin_ = box.lo;
        nx_ = std::max(1, static_cast<int>(std::ceil(box.extent().x / cell)) + 1);
        ny_ = std::max(1, static_cast<int>(std::ceil(box.extent().y / cell)) + 1);
        buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
        for (std::size_t k = 0; k < samples.size(); ++k) {
            auto [i, j] = cell_of(samples[k].point);
            buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(k));
        }
    }

    int nearest(std::span<const BoundarySample> samples, Vec2 x) const {
        auto [ci, cj] = cell_of(x);
        int best = -1;
        double best_d2 = kInf;
        const int max_ring = std::max(nx_, ny_);
        for (int ring = 0; ring <= max_ring; ++ring) {
            // Every point in ring r is at least (r-1)*cell away from x.
            if (best >= 0) {
                const double lower = (ring - 1) * cell_;
                if (lower > 0.0 && lower * lower > best_d2) break;
            }
            auto visit = [&](int i, int j) {
                if (i < 0 || i >= nx_ || j < 0 || j >= ny_) return;
                for (int k : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
                    const Vec2 d = samples[k].point - x;
                    const double d2 = dot(d, d);
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best = k;
                    }
                }
            };
            if (ring == 0) {
                visit(ci, cj);
                continue;
            }
            // Only the cells on the square ring itself.
            for (int i = ci - ring; i <= ci + ring; ++i) {
                visit(i, cj - ring);
                visit(i, cj + ring);
            }
            for (int j = cj - ring + 1; j <= cj + ring - 1; ++j) {
                visit(ci - ring, j);
                visit(ci + ring, j);
            }
        }
        return best;
    }

private:
    std::pair<int, int> cell_of(Vec2 p) const {
        int i = static_cast<int>(std::floor((p.x - origin_.x) / cell_));
        int j = static_cast<int>(std::floor((p.y - origin_.y) / cell_));
        return {std::clamp(i, 0, nx_ - 1), std::clamp(j, 0, ny_ - 1)};
    }

    double cell_ = 1.0;
    Vec2 origin_;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

// Closest point on the ellipse (x/e0)^2 + (y/e1)^2 = 1 to (y0, y1), first
// quadrant, e0 >= e1 > 0. Robust bisection form.
Vec2 closest_on_ellipse_quadrant(double e0, double e1, double y0, double y1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return {y0, y1};
            const double r0 = (e0 / e1) * (e0 / e1);
            const double n0 = r0 * z0;
            double s0 = z1 - 1.0;
            double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
            double s = 0.0;
            for (int i = 0; i < 2000; ++i) {
                s = 0.5 * (s0 + s1);
                if (s == s0 || s == s1) break;
                const double q0 = n0 / (s + r0);
                const double q1 = z1 / (s + 1.0);
                g = q0 * q0 + q1 * q1 - 1.0;
                if (g > 0.0) s0 = s;
                else if (g < 0.0) s1 = s;
                else break;
            }
            return {r0 * y0 / (s + r0), y1 / (s + 1.0)};
        }
        return {0.0, e1};
    }
    const double numer0 = e0 * y0;
    const double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        const double xde0 = numer0 / denom0;
        return {e0 * xde0, e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0))};
    }
    return {e0, 0.0};
}

double ellipse_speed(double a, double b, double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); }

// Simpson integral of the ellipse speed on [t0, t1].
double ellipse_arc(double a, double b, double t0, double t1) {
    const double tm = 0.5 * (t0 + t1);
    return (t1 - t0) / 6.0 * (ellipse_speed(a, b, t0) + 4.0 * ellipse_speed(a, b, tm) + ellipse_speed(a, b, t1));
}

} // namespace

struct Domain::Data {
    ShapeDescriptor shape;
    Box bbox;
    std::vector<BoundarySample> samples;
    double perimeter = 0.0;
    std::vector<double> component_start;
    std::vector<double> component_length;

    // Ellipse: arclength table s(theta) on a uniform theta grid.
    std::vector<double> ellipse_s;
    double ellipse_dtheta = 0.0;

    SampleBuckets buckets;
    double diameter = 0.0;
    double smoothness_radius = 0.0;
    double sampled_smoothness_radius = 0.0;

    // ---- exact shape helpers -------------------------------------------
    double ellipse_theta_of_s(double s) const;
    BoundarySample ellipse_point(double theta, double s) const;
    BoundarySample rounded_rect_at(double s) const;
    double rounded_rect_s_of(Vec2 p) const;

    // ---- level-set helpers ---------------------------------------------
    Vec2 project_to_zero(Vec2 q) const;
    BoundarySample level_set_sample(Vec2 p, double s, int component) const;
    BoundarySample level_set_closest(Vec2 x) const;

    double signed_distance(Vec2 x) const;
    BoundarySample nearest(Vec2 x) const;
    BoundarySample at(double s) const;
    double inside(Vec2 x) const;
    double clearance(const BoundarySample& y, double t_max) const;
    void finish(int samples_requested);
};

// ----------------------------------------------------------------------------
// Ellipse

double Domain::Data::ellipse_theta_of_s(double s) const {
    const auto& e = std::get<EllipseShape>(shape);
    s = std::fmod(s, perimeter);
    if (s < 0.0) s += perimeter;
    auto it = std::upper_bound(ellipse_s.begin(), ellipse_s.end(), s);
    const std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - ellipse_s.begin() - 1));
    double theta0 = k * ellipse_dtheta;
    double s0 = ellipse_s[k];
    double theta = theta0 + (s - s0) / ellipse_speed(e.a, e.b, theta0);
    for (int i = 0; i < 8; ++i) {
        const double f = s0 + ellipse_arc(e.a, e.b, theta0, theta) - s;
        const double step = f / ellipse_speed(e.a, e.b, theta);
        theta -= step;
        if (std::abs(step) < 1e-16) break;
    }
    return theta;
}

BoundarySample Domain::Data::ellipse_point(double theta, double s) const {
    const auto& e = std::get<EllipseShape>(shape);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    BoundarySample b;
    b.point = e.center + Vec2{e.a * c, e.b * sn};
    const Vec2 outward{e.b * c, e.a * sn};
    b.normal = -outward / norm(outward);
    const double q = e.a * e.a * sn * sn + e.b * e.b * c * c;
    b.curvature = e.a * e.b / (q * std::sqrt(q));
    b.s = s;
    return b;
}

// ----------------------------------------------------------------------------
// Rounded rectangle. Arclength starts at the lower end of the right side and
// runs counter-clockwise.

BoundarySample Domain::Data::rounded_rect_at(double s) const {
    const auto& r = std::get<RoundedRectShape>(shape);
    s = std::fmod(s, perimeter);
    if (s < 0.0) s += perimeter;
    const double ix = r.half_x - r.corner_radius;
    const double iy = r.half_y - r.corner_radius;
    const double arc = 0.5 * kPi * r.corner_radius;
    const double seg[8] = {2 * iy, arc, 2 * ix, arc, 2 * iy, arc, 2 * ix, arc};
    const Vec2 corner[4] = {{ix, iy}, {-ix, iy}, {-ix, -iy}, {ix, -iy}};
    BoundarySample b;
    b.s = s;
    double rem = s;
    for (int k = 0; k < 8; ++k) {
        if (rem > seg[k] && k < 7) {
            rem -= seg[k];
            continue;
        }
        rem = std::min(rem, seg[k]);
        if (k % 2 == 0) {
            // Straight sides: right (up), top (left), left (down), bottom (right).
            const int side = k / 2;
            const Vec2 start[4] = {{r.half_x, -iy}, {ix, r.half_y}, {-r.half_x, iy}, {-ix, -r.half_y}};
            const Vec2 dir[4] = {{0, 1}, {-1, 0}, {0, -1}, {1, 0}};
            b.point = r.center + start[side] + dir[side] * rem;
            b.normal = perp(dir[side]);
            b.curvature = 0.0;
        } else {
            const int c = k / 2;
            const double angle = 0.5 * kPi * c + (r.corner_radius > 0.0 ? rem / r.corner_radius : 0.0);
            const Vec2 radial{std::cos(angle), std::sin(angle)};
            b.point = r.center + corner[c] + radial * r.corner_radius;
            b.normal = -radial;
            b.curvature = r.corner_radius > 0.0 ? 1.0 / r.corner_radius : kInf;
        }
        break;
    }
    return b;
}

double Domain::Data::rounded_rect_s_of(Vec2 p) const {
    const auto& r = std::get<RoundedRectShape>(shape);
    const Vec2 q = p - r.center;
    const double ix = r.half_x - r.corner_radius;
    const double iy = r.half_y - r.corner_radius;
    const double arc = 0.5 * kPi * r.corner_radius;
    const double offsets[8] = {0.0,
                               2 * iy,
                               2 * iy + arc,
                               2 * iy + arc + 2 * ix,
                               2 * iy + 2 * arc + 2 * ix,
                               4 * iy + 2 * arc + 2 * ix,
                               4 * iy + 3 * arc + 2 * ix,
                               4 * iy + 3 * arc + 4 * ix};
    const double tol = 1e-12 * (1.0 + r.half_x + r.half_y);
    if (std::abs(q.x - r.half_x) <= tol && std::abs(q.y) <= iy + tol) return offsets[0] + (q.y + iy);
    if (std::abs(q.y - r.half_y) <= tol && std::abs(q.x) <= ix + tol) return offsets[2] + (ix - q.x);
    if (std::abs(q.x + r.half_x) <= tol && std::abs(q.y) <= iy + tol) return offsets[4] + (iy - q.y);
    if (std::abs(q.y + r.half_y) <= tol && std::abs(q.x) <= ix + tol) return offsets[6] + (q.x + ix);
    // Corner arcs.
    const Vec2 corner[4] = {{ix, iy}, {-ix, iy}, {-ix, -iy}, {ix, -iy}};
    int c = q.x >= 0.0 ? (q.y >= 0.0 ? 0 : 3) : (q.y >= 0.0 ? 1 : 2);
    const Vec2 rel = q - corner[c];
    double angle = std::atan2(rel.y, rel.x) - 0.5 * kPi * c;
    while (angle < 0.0) angle += 2 * kPi;
    angle = std::min(angle, 0.5 * kPi);
    return offsets[2 * c + 1] + angle * r.corner_radius;
}

// ----------------------------------------------------------------------------
// Level sets

Vec2 Domain::Data::project_to_zero(Vec2 q) const {
    const auto& ls = std::get<LevelSetShape>(shape);
    for (int i = 0; i < 30; ++i) {
        const Jet2 j = ls.g.jet(q);
        const double gg = dot(j.g, j.g);
        if (gg == 0.0) break;
        const Vec2 step = j.g * (j.v / gg);
        q -= step;
        if (norm(step) < 1e-15 * (1.0 + norm(q))) break;
    }
    return q;
}

BoundarySample Domain::Data::level_set_sample(Vec2 p, double s, int component) const {
    const auto& ls = std::get<LevelSetShape>(shape);
    const Jet2 j = ls.g.jet(p);
    const double gn = norm(j.g);
    BoundarySample b;
    b.point = p;
    b.normal = -j.g / gn;
    b.curvature = (j.h.xx * j.g.y * j.g.y - 2.0 * j.h.xy * j.g.x * j.g.y + j.h.yy * j.g.x * j.g.x) / (gn * gn * gn);
    b.s = s;
    b.component = component;
    return b;
}

BoundarySample Domain::Data::level_set_closest(Vec2 x) const {
    const int k = buckets.nearest(samples, x);
    const BoundarySample& s0 = samples[k];
    const auto& ls = std::get<LevelSetShape>(shape);
    // Newton on g(p) = 0, (x - p) x grad g(p) = 0 from the nearest sample.
    Vec2 p = s0.point;
    bool newton_ok = false;
    const double reach = 4.0 * perimeter / static_cast<double>(samples.size()) + 1e-12;
    for (int it = 0; it < 30; ++it) {
        const Jet2 j = ls.g.jet(p);
        const Vec2 r = x - p;
        const double f1 = j.v;
        const double f2 = r.x * j.g.y - r.y * j.g.x;
        const double a11 = j.g.x, a12 = j.g.y;
        const double a21 = -j.g.y + r.x * j.h.xy - r.y * j.h.xx;
        const double a22 = j.g.x + r.x * j.h.yy - r.y * j.h.xy;
        const double det = a11 * a22 - a12 * a21;
        if (!(std::abs(det) > 0.0)) break;
        const Vec2 step{(f1 * a22 - f2 * a12) / det, (a11 * f2 - a21 * f1) / det};
        p -= step;
        if (!(distance(p, s0.point) < reach)) break;
        if (norm(step) < 1e-14 * (1.0 + norm(p))) {
            newton_ok = true;
            break;
        }
    }
    if (!newton_ok) {
        // Tangential fixed-point iteration; slower but robust.
        p = s0.point;
        for (int it = 0; it < 40; ++it) {
            const Jet2 j = ls.g.jet(p);
            const Vec2 t = perp(j.g / norm(j.g));
            const Vec2 moved = project_to_zero(p + t * dot(x - p, t));
            const double step = distance(moved, p);
            p = moved;
            if (step < 1e-14 * (1.0 + norm(p))) break;
        }
    }
    // Arclength: nearest sample plus the tangential offset.
    const Vec2 tangent = perp(s0.normal);
    const double s = s0.s + dot(p - s0.point, tangent);
    return level_set_sample(p, s, s0.component);
}

// ----------------------------------------------------------------------------
// Dispatch

double Domain::Data::inside(Vec2 x) const {
    return std::visit(
        [&](const auto& sh) -> double {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, DiskShape>) {
                return sh.radius - distance(x, sh.center);
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                const Vec2 q = x - sh.center;
                return 1.0 - (q.x / sh.a) * (q.x / sh.a) - (q.y / sh.b) * (q.y / sh.b);
            } else if constexpr (std::is_same_v<T, RoundedRectShape>) {
                return signed_distance(x);
            } else {
                return -sh.g(x);
            }
        },
        shape);
}

BoundarySample Domain::Data::nearest(Vec2 x) const {
    return std::visit(
        [&](const auto& sh) -> BoundarySample {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, DiskShape>) {
                Vec2 q = x - sh.center;
                double r = norm(q);
                const Vec2 dir = r > 0.0 ? q / r : Vec2{1.0, 0.0};
                double angle = std::atan2(dir.y, dir.x);
                if (angle < 0.0) angle += 2 * kPi;
                BoundarySample b;
                b.point = sh.center + dir * sh.radius;
                b.normal = -dir;
                b.curvature = 1.0 / sh.radius;
                b.s = angle * sh.radius;
                return b;
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                const Vec2 q = x - sh.center;
                const bool swap = sh.b > sh.a;
                const double e0 = swap ? sh.b : sh.a;
                const double e1 = swap ? sh.a : sh.b;
                const double y0 = std::abs(swap ? q.y : q.x);
                const double y1 = std::abs(swap ? q.x : q.y);
                Vec2 c = closest_on_ellipse_quadrant(e0, e1, y0, y1);
                if (swap) std::swap(c.x, c.y);
                c.x = std::copysign(c.x, q.x);
                c.y = std::copysign(c.y, q.y);
                double theta = std::atan2(c.y / sh.b, c.x / sh.a);
                if (theta < 0.0) theta += 2 * kPi;
                const std::size_t k = std::min(ellipse_s.size() - 1,
                                               static_cast<std::size_t>(theta / ellipse_dtheta));
                const double s = ellipse_s[k] + ellipse_arc(sh.a, sh.b, k * ellipse_dtheta, theta);
                BoundarySample b = ellipse_point(theta, s);
                b.point = sh.center + c;
                return b;
            } else if constexpr (std::is_same_v<T, RoundedRectShape>) {
                const Vec2 q = x - sh.center;
                const double ix = sh.half_x - sh.corner_radius;
                const double iy = sh.half_y - sh.corner_radius;
                Vec2 foot;
                if (std::abs(q.x) <= ix && std::abs(q.y) <= iy) {
                    // Inside the core rectangle: nearest straight side.
                    const double dx = sh.half_x - std::abs(q.x);
                    const double dy = sh.half_y - std::abs(q.y);
                    foot = dx <= dy ? Vec2{std::copysign(sh.half_x, q.x), q.y} : Vec2{q.x, std::copysign(sh.half_y, q.y)};
                } else {
                    const Vec2 core{std::clamp(q.x, -ix, ix), std::clamp(q.y, -iy, iy)};
                    const Vec2 off = q - core;
                    foot = core + off * (sh.corner_radius / norm(off));
                    if (sh.corner_radius == 0.0) foot = core;
                }
                return rounded_rect_at(rounded_rect_s_of(sh.center + foot));
            } else {
                return level_set_closest(x);
            }
        },
        shape);
}

double Domain::Data::signed_distance(Vec2 x) const {
    return std::visit(
        [&](const auto& sh) -> double {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, DiskShape>) {
                return sh.radius - distance(x, sh.center);
            } else if constexpr (std::is_same_v<T, RoundedRectShape>) {
                const Vec2 q = x - sh.center;
                const double ix = sh.half_x - sh.corner_radius;
                const double iy = sh.half_y - sh.corner_radius;
                const double qx = std::abs(q.x) - ix;
                const double qy = std::abs(q.y) - iy;
                const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
                const double sdf = outside + std::min(std::max(qx, qy), 0.0) - sh.corner_radius;
                return -sdf;
            } else {
                const BoundarySample b = nearest(x);
                const double d = distance(x, b.point);
                return inside(x) >= 0.0 ? d : -d;
            }
        },
        shape);
}

BoundarySample Domain::Data::at(double s) const {
    return std::visit(
        [&](const auto& sh) -> BoundarySample {
            using T = std::decay_t<decltype(sh)>;
            double sm = std::fmod(s, perimeter);
            if (sm < 0.0) sm += perimeter;
            if constexpr (std::is_same_v<T, DiskShape>) {
                const double angle = sm / sh.radius;
                const Vec2 dir{std::cos(angle), std::sin(angle)};
                BoundarySample b;
                b.point = sh.center + dir * sh.radius;
                b.normal = -dir;
                b.curvature = 1.0 / sh.radius;
                b.s = sm;
                return b;
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                return ellipse_point(ellipse_theta_of_s(sm), sm);
            } else if constexpr (std::is_same_v<T, RoundedRectShape>) {
                return rounded_rect_at(sm);
            } else {
                // Interpolate between samples, then project onto the zero set.
                auto it = std::upper_bound(samples.begin(), samples.end(), sm,
                                           [](double v, const BoundarySample& b) { return v < b.s; });
                std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - samples.begin() - 1));
                const BoundarySample& a = samples[k];
                const int comp = a.component;
                const double comp_end = component_start[comp] + component_length[comp];
                std::size_t next = k + 1;
                if (next >= samples.size() || samples[next].component != comp) {
                    next = k;
                    while (next > 0 && samples[next - 1].component == comp) --next;
                }
                const BoundarySample& b = samples[next];
                const double seg = (next > k) ? b.s - a.s : comp_end - a.s;
                const double w = seg > 0.0 ? (sm - a.s) / seg : 0.0;
                const Vec2 p = project_to_zero(a.point * (1.0 - w) + b.point * w);
                return level_set_sample(p, sm, comp);
            }
        },
        shape);
}

double Domain::Data::clearance(const BoundarySample& y, double t_max) const {
    // Largest t for which y stays the nearest boundary point of y + t N.
    auto holds = [&](double t) {
        const double d = signed_distance(y.point + y.normal * t);
        return std::abs(d - t) <= 1e-9 * (1.0 + t);
    };
    if (holds(t_max)) return t_max;
    double lo = 0.0;
    double hi = t_max;
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? lo : hi) = mid;
    }
    return lo;
}

void Domain::Data::finish(int samples_requested) {
    (void)samples_requested;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const std::size_t n = (k + 1) % samples.size();
        if (samples[n].component != samples[k].component) continue;
        if (distance(samples[k].point, samples[n].point) < 1e-14 * (1.0 + norm(samples[k].point)))
            throw MalformedDomainError("degenerate boundary parametrization: consecutive samples coincide");
        if (!std::isfinite(samples[k].curvature) && !std::holds_alternative<RoundedRectShape>(shape))
            throw MalformedDomainError("non-finite boundary curvature");
    }
    if (component_start.empty()) {
        component_start = {0.0};
        component_length = {perimeter};
    }
    const Vec2 ext = bbox.extent();
    const double cell = std::max(4.0 * perimeter / std::max<std::size_t>(1, samples.size()),
                                 std::max(ext.x, ext.y) / 64.0);
    buckets.build(samples, bbox, cell);

    // Diameter: max pairwise distance between samples unless analytic.
    if (auto* d = std::get_if<DiskShape>(&shape)) {
        diameter = 2.0 * d->radius;
    } else if (auto* e = std::get_if<EllipseShape>(&shape)) {
        diameter = 2.0 * std::max(e->a, e->b);
    } else if (auto* r = std::get_if<RoundedRectShape>(&shape)) {
        diameter = 2.0 * (std::hypot(r->half_x - r->corner_radius, r->half_y - r->corner_radius) + r->corner_radius);
    } else {
        double best = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            for (std::size_t j = i + 1; j < samples.size(); ++j)
                best = std::max(best, distance(samples[i].point, samples[j].point));
        diameter = best;
    }

    double focal = kInf;
    double medial = kInf;
    for (const BoundarySample& b : samples) {
        if (b.curvature > 0.0) focal = std::min(focal, 1.0 / b.curvature);
        medial = std::min(medial, clearance(b, 0.5 * diameter));
    }
    sampled_smoothness_radius = std::min(focal, medial);
    if (auto* d = std::get_if<DiskShape>(&shape)) {
        smoothness_radius = d->radius;
    } else if (auto* e = std::get_if<EllipseShape>(&shape)) {
        const double big = std::max(e->a, e->b);
        const double small = std::min(e->a, e->b);
        smoothness_radius = small * small / big;
    } else {
        smoothness_radius = sampled_smoothness_radius;
    }
}

// ----------------------------------------------------------------------------
// Factories

namespace {

// Marching squares on g over `box`, returning closed polylines of the zero set.
std::vector<std::vector<Vec2>> trace_zero_set(const Expression& g, Box box, int cells) {
    const Vec2 ext = box.extent();
    const double hx = ext.x / cells;
    const double hy = ext.y / cells;
    const int nv = cells + 1;
    std::vector<double> val(static_cast<std::size_t>(nv) * nv);
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nv; ++i) {
            double v = g(box.lo.x + i * hx, box.lo.y + j * hy);
            if (v == 0.0) v = 1e-300;  // keep vertices off the zero set
            val[static_cast<std::size_t>(j) * nv + i] = v;
        }
    auto at = [&](int i, int j) { return val[static_cast<std::size_t>(j) * nv + i]; };
    // Edge ids: horizontal (i,j)-(i+1,j) -> j*cells+i; vertical (i,j)-(i,j+1) -> H + j*nv + i.
    const long horizontal = static_cast<long>(cells) * nv;
    auto hid = [&](int i, int j) { return static_cast<long>(j) * cells + i; };
    auto vid = [&](int i, int j) { return horizontal + static_cast<long>(j) * nv + i; };
    auto crossing = [&](long id) -> Vec2 {
        if (id < horizontal) {
            const int j = static_cast<int>(id / cells);
            const int i = static_cast<int>(id % cells);
            const double a = at(i, j), b = at(i + 1, j);
            const double t = a / (a - b);
            return {box.lo.x + (i + t) * hx, box.lo.y + j * hy};
        }
        const long r = id - horizontal;
        const int j = static_cast<int>(r / nv);
        const int i = static_cast<int>(r % nv);
        const double a = at(i, j), b = at(i, j + 1);
        const double t = a / (a - b);
        return {box.lo.x + i * hx, box.lo.y + (j + t) * hy};
    };

    std::map<long, std::vector<long>> links;
    auto connect = [&](long a, long b) {
        links[a].push_back(b);
        links[b].push_back(a);
    };
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            const bool s0 = at(i, j) < 0, s1 = at(i + 1, j) < 0, s2 = at(i + 1, j + 1) < 0, s3 = at(i, j + 1) < 0;
            std::vector<long> e;
            const long bottom = hid(i, j), right = vid(i + 1, j), top = hid(i, j + 1), left = vid(i, j);
            if (s0 != s1) e.push_back(bottom);
            if (s1 != s2) e.push_back(right);
            if (s2 != s3) e.push_back(top);
            if (s3 != s0) e.push_back(left);
            if (e.size() == 2) {
                connect(e[0], e[1]);
            } else if (e.size() == 4) {
                // Saddle: decide by the center value.
                const double c = 0.25 * (at(i, j) + at(i + 1, j) + at(i + 1, j + 1) + at(i, j + 1));
                if ((c < 0) == s0) {
                    connect(bottom, right);
                    connect(top, left);
                } else {
                    connect(bottom, left);
                    connect(right, top);
                }
            }
        }
    }

    std::vector<std::vector<Vec2>> loops;
    std::map<long, bool> used;
    for (const auto& [start, nb] : links) {
        if (used[start]) continue;
        if (nb.size() != 2) throw MalformedDomainError("level set boundary is not a closed curve inside the bounding box");
        std::vector<Vec2> loop;
        long prev = -1;
        long cur = start;
        while (!used[cur]) {
            used[cur] = true;
            loop.push_back(crossing(cur));
            const auto& n = links[cur];
            const long next = (n[0] != prev) ? n[0] : n[1];
            prev = cur;
            cur = next;
        }
        if (loop.size() >= 3) loops.push_back(std::move(loop));
    }
    return loops;
}

double solve_dumbbell_parameter(double neck_curvature) {
    // Cassini oval with c = 1: neck curvature (A - 2) / (A sqrt(A - 1)) for A = a^2 in (1, 2).
    if (!(neck_curvature < 0.0))
        throw MalformedDomainError("dumbbell neck curvature must be negative");
    auto kappa = [](double A) { return (A - 2.0) / (A * std::sqrt(A - 1.0)); };
    double lo = 1.0 + 1e-14;
    double hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kappa(mid) < neck_curvature ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

Domain Domain::disk(double radius, Vec2 center, int samples) {
    if (!(radius > 0.0)) throw MalformedDomainError("disk radius must be positive");
    if (samples < 8) throw MalformedDomainError("at least 8 boundary samples are required");
    auto d = std::make_shared<Data>();
    d->shape = DiskShape{center, radius};
    d->bbox = {center - Vec2{radius, radius}, center + Vec2{radius, radius}};
    d->perimeter = 2 * kPi * radius;
    for (int k = 0; k < samples; ++k) d->samples.push_back(d->at(d->perimeter * k / samples));
    d->finish(samples);
    return Domain(d);
}

Domain Domain::ellipse(double a, double b, Vec2 center, int samples) {
    if (!(a > 0.0 && b > 0.0)) throw MalformedDomainError("ellipse semi-axes must be positive");
    if (samples < 8) throw MalformedDomainError("at least 8 boundary samples are required");
    auto d = std::make_shared<Data>();
    d->shape = EllipseShape{center, a, b};
    d->bbox = {center - Vec2{a, b}, center + Vec2{a, b}};
    const int table = 8192;
    d->ellipse_dtheta = 2 * kPi / table;
    d->ellipse_s.resize(table + 1);
    d->ellipse_s[0] = 0.0;
    for (int k = 0; k < table; ++k)
        d->ellipse_s[k + 1] = d->ellipse_s[k] + ellipse_arc(a, b, k * d->ellipse_dtheta, (k + 1) * d->ellipse_dtheta);
    d->perimeter = d->ellipse_s.back();
    for (int k = 0; k < samples; ++k) d->samples.push_back(d->at(d->perimeter * k / samples));
    d->finish(samples);
    return Domain(d);
}

Domain Domain::rounded_rect(double half_x, double half_y, double corner_radius, Vec2 center, int samples) {
    if (!(half_x > 0.0 && half_y > 0.0)) throw MalformedDomainError("rectangle half-widths must be positive");
    if (corner_radius < 0.0 || corner_radius > std::min(half_x, half_y))
        throw MalformedDomainError("corner radius must lie in [0, min(half_x, half_y)]");
    if (samples < 8) throw MalformedDomainError("at least 8 boundary samples are required");
    auto d = std::make_shared<Data>();
    d->shape = RoundedRectShape{center, half_x, half_y, corner_radius};
    d->bbox = {center - Vec2{half_x, half_y}, center + Vec2{half_x, half_y}};
    d->perimeter = 4 * (half_x - corner_radius) + 4 * (half_y - corner_radius) + 2 * kPi * corner_radius;
    // Half-step offset keeps samples off the corners of a sharp rectangle.
    for (int k = 0; k < samples; ++k) d->samples.push_back(d->at(d->perimeter * (k + 0.5) / samples));
    d->finish(samples);
    return Domain(d);
}

Domain Domain::level_set(const Expression& g, Box bbox, int samples, std::string label) {
    if (samples < 8) throw MalformedDomainError("at least 8 boundary samples are required");
    auto d = std::make_shared<Data>();
    d->shape = LevelSetShape{g, bbox, label};
    d->bbox = bbox;
    auto loops = trace_zero_set(g, bbox, 512);
    if (loops.empty()) throw MalformedDomainError("level set has no zero crossing inside its bounding box");

    // Polyline lengths after projection onto the zero set.
    std::vector<std::vector<Vec2>> projected;
    std::vector<double> lengths;
    double total = 0.0;
    for (auto& loop : loops) {
        std::vector<Vec2> pts;
        pts.reserve(loop.size());
        for (Vec2 p : loop) pts.push_back(d->project_to_zero(p));
        double len = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) len += distance(pts[k], pts[(k + 1) % pts.size()]);
        lengths.push_back(len);
        total += len;
        projected.push_back(std::move(pts));
    }

    double offset = 0.0;
    for (std::size_t c = 0; c < projected.size(); ++c) {
        const auto& pts = projected[c];
        const int count = std::max(16, static_cast<int>(std::lround(samples * lengths[c] / total)));
        std::vector<double> cum(pts.size() + 1, 0.0);
        for (std::size_t k = 0; k < pts.size(); ++k) cum[k + 1] = cum[k] + distance(pts[k], pts[(k + 1) % pts.size()]);
        std::vector<Vec2> resampled;
        std::size_t seg = 0;
        for (int k = 0; k < count; ++k) {
            const double target = lengths[c] * k / count;
            while (seg + 1 < pts.size() && cum[seg + 1] < target) ++seg;
            const double w = (target - cum[seg]) / std::max(1e-300, cum[seg + 1] - cum[seg]);
            const Vec2 p = pts[seg] * (1.0 - w) + pts[(seg + 1) % pts.size()] * w;
            resampled.push_back(d->project_to_zero(p));
        }
        // Arclength of the resampled points by chord accumulation.
        double s = 0.0;
        const std::size_t first = d->samples.size();
        for (int k = 0; k < count; ++k) {
            d->samples.push_back(d->level_set_sample(resampled[k], offset + s, static_cast<int>(c)));
            s += distance(resampled[k], resampled[(k + 1) % count]);
        }
        (void)first;
        d->component_start.push_back(offset);
        d->component_length.push_back(s);
        offset += s;
    }
    d->perimeter = offset;
    d->finish(samples);
    return Domain(d);
}

Domain Domain::dumbbell(double neck_curvature, int samples) {
    const double A = solve_dumbbell_parameter(neck_curvature);
    std::ostringstream os;
    os.precision(17);
    os << "(x^2+y^2)^2 - 2*(x^2-y^2) - (" << A * A << " - 1)";
    const Expression g = Expression::parse(os.str());
    const double half = std::sqrt(1.0 + A) + 0.1;
    return level_set(g, {{-half, -half}, {half, half}}, samples, "dumbbell");
}

// ----------------------------------------------------------------------------
// Public surface

const ShapeDescriptor& Domain::shape() const { return data_->shape; }

std::string Domain::name() const {
    return std::visit(
        [](const auto& sh) -> std::string {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, DiskShape>) return "disk";
            else if constexpr (std::is_same_v<T, EllipseShape>) return "ellipse";
            else if constexpr (std::is_same_v<T, RoundedRectShape>) return "rounded_rect";
            else return sh.label;
        },
        data_->shape);
}

const Box& Domain::bbox() const { return data_->bbox; }
std::span<const BoundarySample> Domain::boundary_samples() const { return data_->samples; }
double Domain::perimeter() const { return data_->perimeter; }
double Domain::signed_distance(Vec2 x) const { return data_->signed_distance(x); }
double Domain::inside_function(Vec2 x) const { return data_->inside(x); }
BoundarySample Domain::nearest_boundary(Vec2 x) const { return data_->nearest(x); }
BoundarySample Domain::boundary_at(double s) const { return data_->at(s); }
double Domain::boundary_curvature(double s) const { return data_->at(s).curvature; }
double Domain::smoothness_radius() const { return data_->smoothness_radius; }
double Domain::sampled_smoothness_radius() const { return data_->sampled_smoothness_radius; }
double Domain::diameter() const { return data_->diameter; }

double Domain::parallel_curvature(double s, double t) const {
    const double kappa = boundary_curvature(s);
    const double q = 1.0 - t * kappa;
    if (!(q > 0.0)) {
        std::ostringstream os;
        os << "parallel curve at distance " << t << " passes the focal point (curvature " << kappa << ")";
        throw FocalPointError(os.str());
    }
    return kappa / q;
}

DistanceJet Domain::distance_jet(Vec2 x) const {
    DistanceJet j;
    const BoundarySample b = nearest_boundary(x);
    j.d = signed_distance(x);
    j.grad = b.normal;
    const double q = 1.0 - j.d * b.curvature;
    if (!(j.d >= 0.0 && j.d < smoothness_radius() && q > 0.0)) return j;
    const double kappa_t = b.curvature / q;
    j.hess = outer(perp(b.normal));
    j.hess.xx *= -kappa_t;
    j.hess.xy *= -kappa_t;
    j.hess.yy *= -kappa_t;
    j.valid = true;
    return j;
}

double Domain::arclength_distance(double s1, double s2) const {
    auto component_of = [&](double s) {
        const auto& st = data_->component_start;
        auto it = std::upper_bound(st.begin(), st.end(), s);
        return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - st.begin() - 1));
    };
    const std::size_t c1 = component_of(s1);
    const std::size_t c2 = component_of(s2);
    if (c1 != c2) return kInf;
    const double len = data_->component_length[c1];
    double d = std::fmod(std::abs(s1 - s2), len);
    return std::min(d, len - d);
}

} // namespace mcgraph
