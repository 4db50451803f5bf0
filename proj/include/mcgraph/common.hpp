#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mcgraph {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
/// Counter-clockwise rotation by 90 degrees.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

/// Symmetric 2x2 matrix, stored as (xx, xy, yy).
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    double trace() const { return xx + yy; }
    Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    double quadratic(Vec2 v) const { return dot(apply(v), v); }
    double max_abs_entry() const { return std::max({std::abs(xx), std::abs(xy), std::abs(yy)}); }
};

inline Sym2 outer(Vec2 a) { return {a.x * a.x, a.x * a.y, a.y * a.y}; }

struct Box {
    Vec2 lo;
    Vec2 hi;

    bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
    Vec2 extent() const { return hi - lo; }
};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedDomainError : public Error { using Error::Error; };
class FocalPointError : public Error { using Error::Error; };
class InvalidFieldError : public Error { using Error::Error; };
class GridMismatchError : public Error { using Error::Error; };
class AssemblyError : public Error { using Error::Error; };
class NotApplicableError : public Error { using Error::Error; };
class RefusedError : public Error { using Error::Error; };
class InsufficientRefinementsError : public Error { using Error::Error; };
class ExpressionError : public Error { using Error::Error; };

class SolverError : public Error {
public:
    SolverError(const std::string& what, double condition_estimate)
        : Error(what), condition_estimate_(condition_estimate) {}
    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

inline constexpr double kPi = 3.14159265358979323846;

} // namespace mcgraph
