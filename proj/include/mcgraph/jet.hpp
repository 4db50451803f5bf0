#pragma once

#include "mcgraph/common.hpp"

#include <cmath>

namespace mcgraph {

/// Second-order jet of a function of (x, y): value, gradient and Hessian,
/// propagated exactly through arithmetic and elementary functions.
struct Jet2 {
    double v = 0.0;
    Vec2 g;
    Sym2 h;

    Jet2() = default;
    Jet2(double value) : v(value) {}  // NOLINT: constants promote implicitly
    Jet2(double value, Vec2 grad, Sym2 hess) : v(value), g(grad), h(hess) {}

    static Jet2 variable_x(double x) { return {x, {1.0, 0.0}, {}}; }
    static Jet2 variable_y(double y) { return {y, {0.0, 1.0}, {}}; }
};

namespace detail {

// Chain rule for w = f(u) given f(u), f'(u), f''(u).
inline Jet2 compose(const Jet2& u, double f0, double f1, double f2) {
    Jet2 w;
    w.v = f0;
    w.g = u.g * f1;
    w.h.xx = f2 * u.g.x * u.g.x + f1 * u.h.xx;
    w.h.xy = f2 * u.g.x * u.g.y + f1 * u.h.xy;
    w.h.yy = f2 * u.g.y * u.g.y + f1 * u.h.yy;
    return w;
}

} // namespace detail

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.g + b.g, {a.h.xx + b.h.xx, a.h.xy + b.h.xy, a.h.yy + b.h.yy}};
}
inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.g, {-a.h.xx, -a.h.xy, -a.h.yy}}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 w;
    w.v = a.v * b.v;
    w.g = a.g * b.v + b.g * a.v;
    w.h.xx = a.h.xx * b.v + 2.0 * a.g.x * b.g.x + a.v * b.h.xx;
    w.h.xy = a.h.xy * b.v + a.g.x * b.g.y + a.g.y * b.g.x + a.v * b.h.xy;
    w.h.yy = a.h.yy * b.v + 2.0 * a.g.y * b.g.y + a.v * b.h.yy;
    return w;
}
inline Jet2 reciprocal(const Jet2& a) {
    const double r = 1.0 / a.v;
    return detail::compose(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

inline Jet2 sin(const Jet2& a) { return detail::compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return detail::compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet2 tan(const Jet2& a) {
    const double t = std::tan(a.v);
    const double s = 1.0 + t * t;
    return detail::compose(a, t, s, 2.0 * t * s);
}
inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.v);
    return detail::compose(a, e, e, e);
}
inline Jet2 log(const Jet2& a) { return detail::compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet2 sqrt(const Jet2& a) {
    const double s = std::sqrt(a.v);
    return detail::compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 abs(const Jet2& a) {
    const double sg = a.v < 0.0 ? -1.0 : 1.0;
    return detail::compose(a, std::abs(a.v), sg, 0.0);
}
inline Jet2 sinh(const Jet2& a) { return detail::compose(a, std::sinh(a.v), std::cosh(a.v), std::sinh(a.v)); }
inline Jet2 cosh(const Jet2& a) { return detail::compose(a, std::cosh(a.v), std::sinh(a.v), std::cosh(a.v)); }
inline Jet2 tanh(const Jet2& a) {
    const double t = std::tanh(a.v);
    const double s = 1.0 - t * t;
    return detail::compose(a, t, s, -2.0 * t * s);
}
inline Jet2 atan(const Jet2& a) {
    const double q = 1.0 / (1.0 + a.v * a.v);
    return detail::compose(a, std::atan(a.v), q, -2.0 * a.v * q * q);
}
inline Jet2 asin(const Jet2& a) {
    const double q = 1.0 / std::sqrt(1.0 - a.v * a.v);
    return detail::compose(a, std::asin(a.v), q, a.v * q * q * q);
}
inline Jet2 acos(const Jet2& a) {
    const double q = 1.0 / std::sqrt(1.0 - a.v * a.v);
    return detail::compose(a, std::acos(a.v), -q, -a.v * q * q * q);
}
inline Jet2 acosh(const Jet2& a) {
    const double q = 1.0 / std::sqrt(a.v * a.v - 1.0);
    return detail::compose(a, std::acosh(a.v), q, -a.v * q * q * q);
}
/// a^p for a constant exponent.
inline Jet2 pow(const Jet2& a, double p) {
    if (p == 0.0) return Jet2(1.0);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    const double f0 = std::pow(a.v, p);
    const double f1 = p * std::pow(a.v, p - 1.0);
    const double f2 = p * (p - 1.0) * std::pow(a.v, p - 2.0);
    return detail::compose(a, f0, f1, f2);
}
inline Jet2 pow(const Jet2& a, const Jet2& b) {
    const bool constant_exponent = b.g.x == 0.0 && b.g.y == 0.0 && b.h.xx == 0.0 && b.h.xy == 0.0 && b.h.yy == 0.0;
    if (constant_exponent) return pow(a, b.v);
    return exp(b * log(a));
}
inline Jet2 atan2(const Jet2& y, const Jet2& x) {
    // Derivatives are branch independent; only the value needs atan2. Divide by
    // the larger of |x|, |y| to stay away from the pole.
    Jet2 w = std::abs(x.v) >= std::abs(y.v) ? atan(y / x) : -atan(x / y);
    w.v = std::atan2(y.v, x.v);
    return w;
}

} // namespace mcgraph
