#include "mcgraph/curvature.hpp"

#include <charconv>

#include <limits>
#include <sstream>

namespace mcgraph {

PrescribedCurvature PrescribedCurvature::constant(double value) {
    if (!std::isfinite(value)) throw ExpressionError("prescribed curvature must be finite");
    PrescribedCurvature H;
    H.kind_ = Kind::constant;
    H.value_ = value;
    return H;
}

PrescribedCurvature PrescribedCurvature::expression(Expression e) {
    if (e.is_constant()) return constant(e(0.0, 0.0));
    PrescribedCurvature H;
    H.kind_ = Kind::expression;
    H.expr_ = std::move(e);
    return H;
}

PrescribedCurvature PrescribedCurvature::tabulated(Box box, int nx, int ny, std::vector<double> values) {
    if (nx < 2 || ny < 2 || values.size() != static_cast<std::size_t>(nx) * ny)
        throw ExpressionError("tabulated curvature needs an nx x ny table with nx, ny >= 2");
    PrescribedCurvature H;
    H.kind_ = Kind::tabulated;
    H.box_ = box;
    H.nx_ = nx;
    H.ny_ = ny;
    H.table_ = std::move(values);
    return H;
}

double PrescribedCurvature::operator()(Vec2 x) const {
    switch (kind_) {
    case Kind::constant: return value_;
    case Kind::expression: return expr_(x);
    case Kind::tabulated: {
        const Vec2 ext = box_.extent();
        const double fx = std::clamp((x.x - box_.lo.x) / ext.x * (nx_ - 1), 0.0, nx_ - 1.0);
        const double fy = std::clamp((x.y - box_.lo.y) / ext.y * (ny_ - 1), 0.0, ny_ - 1.0);
        const int i = std::min(static_cast<int>(fx), nx_ - 2);
        const int j = std::min(static_cast<int>(fy), ny_ - 2);
        const double tx = fx - i;
        const double ty = fy - j;
        auto at = [&](int a, int b) { return table_[static_cast<std::size_t>(b) * nx_ + a]; };
        return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) + (1 - tx) * ty * at(i, j + 1) +
               tx * ty * at(i + 1, j + 1);
    }
    }
    return 0.0;
}

Vec2 PrescribedCurvature::gradient(Vec2 x) const {
    switch (kind_) {
    case Kind::constant: return {};
    case Kind::expression: return expr_.jet(x).g;
    case Kind::tabulated: {
        const double step = 1e-6 * std::max(box_.extent().x, box_.extent().y);
        const Vec2 ex{step, 0.0};
        const Vec2 ey{0.0, step};
        return {((*this)(x + ex) - (*this)(x - ex)) / (2 * step), ((*this)(x + ey) - (*this)(x - ey)) / (2 * step)};
    }
    }
    return {};
}

std::string PrescribedCurvature::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::constant: {
        char buf[32];
        const auto end = std::to_chars(buf, buf + sizeof buf, value_).ptr;
        os << "constant " << std::string_view(buf, end - buf);
        break;
    }
    case Kind::expression: os << "expression " << expr_.text(); break;
    case Kind::tabulated: os << "tabulated " << nx_ << "x" << ny_; break;
    }
    return os.str();
}

PrescribedCurvature PrescribedCurvature::bind(const Domain& domain, int lattice) const {
    PrescribedCurvature H = *this;
    if (kind_ == Kind::constant) {
        H.h0_ = std::abs(value_);
        H.h1_ = 0.0;
        return H;
    }
    double h0 = 0.0;
    double h1 = 0.0;
    for_each_closure_point(domain, lattice, [&](Vec2 p) {
        const double v = (*this)(p);
        const Vec2 g = gradient(p);
        if (!std::isfinite(v) || !std::isfinite(g.x) || !std::isfinite(g.y))
            throw ExpressionError("prescribed curvature is not finite on the domain");
        h0 = std::max(h0, std::abs(v));
        h1 = std::max(h1, norm(g));
    });
    H.h0_ = h0;
    H.h1_ = h1;
    return H;
}

double PrescribedCurvature::h0() const {
    if (!h0_) {
        if (kind_ == Kind::constant) return std::abs(value_);
        throw Error("curvature norms requested before bind(domain)");
    }
    return *h0_;
}

double PrescribedCurvature::h1() const {
    if (!h1_) {
        if (kind_ == Kind::constant) return 0.0;
        throw Error("curvature norms requested before bind(domain)");
    }
    return *h1_;
}

SerrinAudit check_serrin(const Domain& domain, const PrescribedCurvature& H, int n) {
    if (n < 2) throw Error("dimension n must be at least 2");
    SerrinAudit audit;
    audit.margin = std::numeric_limits<double>::infinity();
    for (const BoundarySample& b : domain.boundary_samples()) {
        const double m = (n - 1) * b.curvature - n * std::abs(H(b.point));
        if (m < audit.margin) {
            audit.margin = m;
            audit.worst_point = b.point;
            audit.worst_s = b.s;
        }
    }
    audit.satisfied = audit.margin >= 0.0;
    return audit;
}

GradientConditionAudit check_gradient_condition(const Domain& domain, const PrescribedCurvature& H, int n,
                                                int lattice) {
    if (n < 2) throw Error("dimension n must be at least 2");
    GradientConditionAudit audit;
    audit.margin = std::numeric_limits<double>::infinity();
    const double factor = static_cast<double>(n) / (n - 1);
    for_each_closure_point(domain, lattice, [&](Vec2 p) {
        const double h = H(p);
        const double m = factor * h * h - norm(H.gradient(p));
        if (m < audit.margin) {
            audit.margin = m;
            audit.worst_point = p;
        }
    });
    audit.satisfied = audit.margin >= 0.0;
    return audit;
}

} // namespace mcgraph
