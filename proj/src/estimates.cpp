#include "mcgraph/estimates.hpp"

#include "mcgraph/operators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cfloat>
#include <limits>
#include <sstream>

namespace mcgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Sym2 projector_perp(Vec2 e) { return {1.0 - e.x * e.x, -e.x * e.y, 1.0 - e.y * e.y}; }

Sym2 scaled(Sym2 a, double s) { return {a.xx * s, a.xy * s, a.yy * s}; }
Sym2 added(Sym2 a, Sym2 b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }

PrescribedCurvature bound_to(const PrescribedCurvature& H, const Domain& domain) {
    return H.bound() ? H : H.bind(domain);
}

} // namespace

DistanceJet DistanceSource::evaluate(const Domain& domain, Vec2 x) const {
    DistanceJet j;
    switch (kind) {
    case Kind::boundary: return domain.distance_jet(x);
    case Kind::radial: {
        const Vec2 q = x - center;
        const double r = norm(q);
        if (!(r > 0.0)) return j;
        j.d = r;
        j.grad = q / r;
        j.hess = scaled(projector_perp(j.grad), 1.0 / r);
        j.valid = true;
        return j;
    }
    case Kind::quadric: {
        if (curvature == 0.0) {
            j.d = dot(x - center, normal);
            j.grad = normal;
            j.valid = true;
            return j;
        }
        const double R = 1.0 / std::abs(curvature);
        const Vec2 c = center + normal / curvature;
        const Vec2 q = x - c;
        const double r = norm(q);
        if (!(r > 0.0)) return j;
        const Vec2 e = q / r;
        if (curvature > 0.0) {
            j.d = R - r;
            j.grad = -e;
            j.hess = scaled(projector_perp(e), -1.0 / r);
        } else {
            j.d = r - R;
            j.grad = e;
            j.hess = scaled(projector_perp(e), 1.0 / r);
        }
        j.valid = true;
        return j;
    }
    }
    return j;
}

TransformedPoint transform_point(Vec2 x, const Profile& psi, const std::function<Jet2(Vec2)>& phi,
                                 const DistanceSource& src, const Domain& domain, const PrescribedCurvature& H,
                                 int n, double tau) {
    TransformedPoint out;
    const DistanceJet rho = src.evaluate(domain, x);
    if (!rho.valid) return out;
    const ProfileValue p = psi(rho.d);
    const Jet2 f = phi ? phi(x) : Jet2(0.0);
    const Vec2 grad = rho.grad * p.d1 + f.g;
    const Sym2 hess = added(added(scaled(outer(rho.grad), p.d2), scaled(rho.hess, p.d1)), f.h);
    const double W2 = 1.0 + dot(grad, grad);
    out.valid = true;
    out.rho = rho.d;
    out.w = p.v + f.v;
    out.W = std::sqrt(W2);
    out.Mw = W2 * hess.trace() - hess.quadratic(grad);
    out.Qw = out.Mw - tau * n * H(x) * W2 * out.W;
    return out;
}

TransformResult transform_radial(const Grid& grid, const Profile& psi, const std::function<Jet2(Vec2)>& phi,
                                 const DistanceSource& src, const PrescribedCurvature& H, int n, double tau,
                                 const std::function<bool(Vec2, double)>& region) {
    TransformResult r{ScalarField(grid), ScalarField(grid), ScalarField(grid), {}, 0};
    const auto nodes = grid.interior_nodes();
    r.valid.assign(nodes.size(), 0);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Vec2 x = grid.position(nodes[k]);
        const TransformedPoint t = transform_point(x, psi, phi, src, grid.domain(), H, n, tau);
        if (!t.valid || (region && !region(x, t.rho))) {
            ++r.excluded;
            continue;
        }
        r.valid[k] = 1;
        r.w.node(nodes[k]) = t.w;
        r.Mw.node(nodes[k]) = t.Mw;
        r.Qw.node(nodes[k]) = t.Qw;
    }
    return r;
}

// ----------------------------------------------------------------------------
// Height

double HeightConstants::growth() const { return limit ? delta : std::expm1(mu * delta) / mu; }

HeightConstants height_constants(const Domain& domain, const PrescribedCurvature& H, int n) {
    HeightConstants c;
    c.delta = domain.diameter();
    const double h0 = bound_to(H, domain).h0();
    if (h0 > 0.0) {
        c.mu = n * h0 * (1.0 + 1e-6);
    } else {
        c.limit = true;
    }
    return c;
}

EstimateAudit height_bound(const Domain& domain, const PrescribedCurvature& H, int n, double boundary_sup,
                           double measured_sup) {
    const HeightConstants c = height_constants(domain, H, n);
    const double bound = boundary_sup + c.growth();
    std::ostringstream note;
    note.precision(10);
    if (c.limit) note << "h0 = 0: limit value delta = " << c.delta << " used";
    else note << "mu = " << c.mu << ", delta = " << c.delta;
    note << "; the curvature condition on H is checked on the whole domain rather than on the unique-nearest-point set";
    return make_audit("height", bound, measured_sup, 1e-12 * (1.0 + bound), note.str());
}

EstimateAudit height_audit(const ScalarField& u, const PrescribedCurvature& H, int n) {
    return height_bound(u.grid().domain(), H, n, u.max_abs_boundary(), u.max_abs());
}

Profile height_profile(const HeightConstants& c) {
    if (c.limit) return [](double t) { return ProfileValue{t, 1.0, 0.0}; };
    const double mu = c.mu;
    const double delta = c.delta;
    return [mu, delta](double t) {
        const double d1 = std::exp(mu * (delta - t));
        return ProfileValue{-std::expm1(-mu * t) * std::exp(mu * delta) / mu, d1, -mu * d1};
    };
}

BarrierCheck height_barrier(const Grid& grid, const PrescribedCurvature& H_in, int n, double boundary_sup) {
    const PrescribedCurvature H = bound_to(H_in, grid.domain());
    const HeightConstants c = height_constants(grid.domain(), H, n);
    const auto phi = [boundary_sup](Vec2) { return Jet2(boundary_sup); };
    TransformResult t = transform_radial(grid, height_profile(c), phi, DistanceSource::boundary(), H, n);
    BarrierCheck out{t.w, -kInf, 0, t.excluded, false};
    const auto nodes = grid.interior_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (!t.valid[k]) continue;
        ++out.checked;
        out.max_Q = std::max(out.max_Q, t.Qw.node(nodes[k]));
    }
    out.pass = out.checked > 0 && out.max_Q <= 0.0;
    // Where d is only Lipschitz (ridge points) w keeps its closed form: the
    // kink of d there is concave, so w remains a supersolution.
    const Profile profile = height_profile(c);
    for (std::size_t k = 0; k < nodes.size(); ++k)
        if (!t.valid[k])
            out.w.node(nodes[k]) =
                profile(std::max(0.0, grid.domain().signed_distance(grid.position(nodes[k])))).v + boundary_sup;
    out.w.foot_values().assign(grid.feet().size(), boundary_sup);
    return out;
}

// ----------------------------------------------------------------------------
// Boundary gradient

Profile boundary_gradient_profile(double nu, double log_k) {
    const double inv_k = std::exp(-log_k);
    return [nu, log_k, inv_k](double t) {
        ProfileValue p;
        if (t > 0.0) {
            const double lk = log_k + std::log(t);
            p.v = lk < 30.0 ? std::log1p(std::exp(lk)) / nu : (lk + std::log1p(std::exp(-lk))) / nu;
        }
        p.d1 = 1.0 / (nu * (inv_k + t));
        p.d2 = -nu * p.d1 * p.d1;
        return p;
    };
}

BoundaryGradientPackage boundary_gradient_package(const Domain& domain, const PrescribedCurvature& H_in, int n,
                                                  const BoundaryData& phi, double u_sup, const ScalarField* u) {
    const PrescribedCurvature H = bound_to(H_in, domain);
    const SerrinAudit serrin = check_serrin(domain, H, n);
    if (!serrin.satisfied) {
        std::ostringstream os;
        os << "boundary gradient estimate refused: the Serrin condition (n-1) kappa >= n |H| fails (margin "
           << serrin.margin << " at (" << serrin.worst_point.x << ", " << serrin.worst_point.y << "))";
        throw RefusedError(os.str());
    }
    const DataNorms dn = phi.norms(domain);
    if (!dn.available) throw RefusedError("boundary gradient estimate refused: boundary data has no C^2 extension");

    BoundaryGradientPackage pkg;
    BarrierParams& P = pkg.params;
    P.n = n;
    const HeightConstants hc = height_constants(domain, H, n);
    P.mu = hc.mu;
    P.delta = hc.delta;
    P.mu_limit = hc.limit;
    P.tau = domain.smoothness_radius();
    double grad_part = 0.0;
    double hess_part = 0.0;
    for (const BoundarySample& b : domain.boundary_samples()) {
        const Vec2 T = perp(b.normal);
        const double kt = b.curvature > 0.0 ? b.curvature / (1.0 - 0.5 * P.tau * b.curvature) : b.curvature;
        grad_part = std::max({grad_part, std::abs(b.normal.x), std::abs(b.normal.y)});
        hess_part = std::max(hess_part, std::abs(kt) * outer(T).max_abs_entry());
    }
    P.d_c2 = 0.5 * P.tau + grad_part + hess_part;
    P.H_c1 = H.c1_norm();
    P.phi_c0 = dn.c0;
    P.phi_c1 = dn.c1;
    P.phi_c2 = dn.c2;
    P.C = 4.0 * n * (1.0 + P.d_c2 + 1.0 / P.tau);
    P.nu = P.C * (1.0 + P.H_c1 + P.phi_c2) * std::pow(1.0 + P.phi_c1, 3);
    P.M = u_sup + P.phi_c0;
    P.log_k = std::log(P.nu) + P.nu * P.M;
    P.a = -std::expm1(-P.nu * P.M) / P.nu;
    P.psi_prime0 = std::exp(P.nu * P.M);
    P.boundary_gradient_bound = P.phi_c1 + P.psi_prime0;
    P.A = 1.0 + 8.0 * n * P.H_c1;
    P.notes.push_back("||d||_2 taken over the strip {d <= tau/2} as sum of sup-norms of derivatives up to order 2");
    pkg.constants_ok = P.a < 1.0 / P.nu && 1.0 / P.nu < P.tau;

    const double measured = u ? boundary_gradient_sup(*u) : 0.0;
    pkg.bound = make_audit("boundary_gradient", P.boundary_gradient_bound, measured, 0.0,
                           u ? "" : "no solution supplied; bound only");

    // Sign checks of the barrier pair on Omega_a = {0 < d < a}.
    const Profile psi = boundary_gradient_profile(P.nu, P.log_k);
    const Profile minus_psi = [psi](double t) {
        const ProfileValue p = psi(t);
        return ProfileValue{-p.v, -p.d1, -p.d2};
    };
    const auto phi_jet = [&phi](Vec2 x) { return phi.extension_jet(x); };
    pkg.max_Q_plus = -kInf;
    pkg.min_Q_minus = kInf;
    auto probe = [&](Vec2 x) {
        const TransformedPoint wp = transform_point(x, psi, phi_jet, DistanceSource::boundary(), domain, H, n);
        const TransformedPoint wm = transform_point(x, minus_psi, phi_jet, DistanceSource::boundary(), domain, H, n);
        if (!wp.valid || !wm.valid || !(wp.rho > 0.0 && wp.rho < P.a)) return;
        ++pkg.sign_samples;
        pkg.max_Q_plus = std::max(pkg.max_Q_plus, wp.Qw);
        pkg.min_Q_minus = std::min(pkg.min_Q_minus, wm.Qw);
    };
    const auto samples = domain.boundary_samples();
    const std::size_t stride = std::max<std::size_t>(1, samples.size() / 1024);
    for (std::size_t k = 0; k < samples.size(); k += stride)
        for (int j = 1; j < 16; ++j) probe(samples[k].point + samples[k].normal * (P.a * j / 16.0));
    if (u) {
        const Grid& g = u->grid();
        const auto nodes = g.interior_nodes();
        for (std::size_t k = 0; k < nodes.size(); ++k)
            if (g.interior_distance(static_cast<int>(k)) < P.a) probe(g.position(nodes[k]));
    }
    pkg.signs_ok = pkg.sign_samples > 0 && pkg.max_Q_plus < 0.0 && pkg.min_Q_minus > 0.0;

    if (u) {
        pkg.sandwich_checked = true;
        pkg.sandwich_ok = true;
        const Grid& g = u->grid();
        const auto nodes = g.interior_nodes();
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double d = g.interior_distance(static_cast<int>(k));
            if (!(d < P.a)) continue;
            const Vec2 x = g.position(nodes[k]);
            const double ps = psi(d).v;
            const double f = phi.extension(x);
            const double val = u->node(nodes[k]);
            const double viol = std::max(val - (ps + f) - 1e-6, (f - ps) - val);
            ++pkg.sandwich_nodes;
            if (viol > 0.0) {
                pkg.sandwich_ok = false;
                pkg.sandwich_violation = std::max(pkg.sandwich_violation, viol);
            }
        }
    }
    return pkg;
}

EstimateAudit global_gradient_bound(const ScalarField& u, const PrescribedCurvature& H_in, int n) {
    const PrescribedCurvature H = bound_to(H_in, u.grid().domain());
    const double A = 1.0 + 8.0 * n * H.c1_norm();
    const double bsup = boundary_gradient_sup(u);
    const double bound = (std::sqrt(3.0) + bsup) * std::exp(2.0 * u.max_abs() * A);
    const double measured = std::max(gradient_sup(u), bsup);
    std::ostringstream note;
    note.precision(10);
    note << "A = " << A << ", boundary gradient sup = " << bsup;
    return make_audit("global_gradient", bound, measured, 0.0, note.str());
}

// ----------------------------------------------------------------------------
// Comparison

const char* to_string(ComparisonVerdict v) {
    switch (v) {
    case ComparisonVerdict::pass: return "pass";
    case ComparisonVerdict::fail: return "fail";
    case ComparisonVerdict::not_applicable: return "not_applicable";
    }
    return "?";
}

ComparisonResult comparison_check(const ScalarField& u, const ScalarField& v, const PrescribedCurvature& H_in, int n,
                                  double boundary_tol, double q_tol) {
    require_same_grid(u, v);
    const Grid& g = u.grid();
    const PrescribedCurvature H = bound_to(H_in, g.domain());
    ComparisonResult r;
    r.q_violation = -kInf;
    r.boundary_violation = -kInf;
    for (std::size_t k = 0; k < u.foot_values().size(); ++k)
        r.boundary_violation = std::max(r.boundary_violation, u.foot(static_cast<int>(k)) - v.foot(static_cast<int>(k)) - boundary_tol);
    const ScalarField qu = apply_Q(u, H, n);
    const ScalarField qv = apply_Q(v, H, n);
    for (int id : g.interior_nodes()) r.q_violation = std::max(r.q_violation, qv.node(id) - qu.node(id) - q_tol);
    if (r.boundary_violation > 0.0 || r.q_violation > 0.0) {
        r.verdict = ComparisonVerdict::not_applicable;
        r.message = r.boundary_violation > 0.0 ? "hypothesis u <= v on the boundary fails"
                                               : "hypothesis Q u >= Q v fails";
        return r;
    }
    const double scale = 1.0 + std::max(u.max_abs(), v.max_abs());
    r.tolerance = boundary_tol + 10.0 * g.h() * g.h() * scale;
    r.max_excess = -kInf;
    for (int id : g.interior_nodes()) r.max_excess = std::max(r.max_excess, u.node(id) - v.node(id));
    r.verdict = r.max_excess <= r.tolerance ? ComparisonVerdict::pass : ComparisonVerdict::fail;
    r.message = r.verdict == ComparisonVerdict::pass ? "u <= v holds" : "u exceeds v in the interior";
    return r;
}

// ----------------------------------------------------------------------------
// Non-existence

namespace {

// Dawson's integral F(x) = exp(-x^2) int_0^x exp(w^2) dw by adaptive quadrature.
double dawson(double x) {
    if (x <= 0.0) return 0.0;
    // With w = x - v the integrand exp(-v (2x - v)) lives in a layer of width
    // about 1/(2x) at v = 0, so integrate over geometrically growing pieces.
    auto f = [x](double v) { return std::exp(-v * (2.0 * x - v)); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double total = 0.0;
    double lo = 0.0;
    double hi = std::min(x, 1.0 / (2.0 * x));
    while (lo < x) {
        double error = 0.0;
        total += GK::integrate(f, lo, hi, 8, 1e-11, &error);
        if (f(hi) < 1e-18 * total) break;
        lo = hi;
        hi = std::min(x, 4.0 * hi);
    }
    return total;
}

// int_a^t (log(r/a))^{-1/2} dr = 2 t F(sqrt(log(t/a))).
double log_integral(double t, double log_a) {
    const double L = std::log(t) - log_a;
    if (!(L > 0.0)) return 0.0;
    return 2.0 * t * dawson(std::sqrt(L));
}

} // namespace

double nonexistence_psi(double t, double log_a, double delta, int n) {
    const double c = std::sqrt(2.0 / (n - 1));
    return c * (log_integral(delta, log_a) - log_integral(t, log_a));
}

Profile nonexistence_psi_profile(double log_a, double delta, int n) {
    const double c = std::sqrt(2.0 / (n - 1));
    return [c, log_a, delta, n](double t) {
        const double L = std::log(t) - log_a;
        ProfileValue p;
        p.v = nonexistence_psi(t, log_a, delta, n);
        p.d1 = -c / std::sqrt(L);
        p.d2 = c / (2.0 * t) * std::pow(L, -1.5);
        return p;
    };
}

Profile nonexistence_phi_profile(double nu, double a, double eps_prime) {
    const double c = std::sqrt(2.0 / nu);
    return [c, a, eps_prime](double t) {
        const double s = t - eps_prime;
        ProfileValue p;
        p.v = c * (std::sqrt(a - eps_prime) - std::sqrt(s));
        p.d1 = -0.5 * c / std::sqrt(s);
        p.d2 = 0.25 * c * std::pow(s, -1.5);
        return p;
    };
}

NonexistenceBound nonexistence_bound(const Domain& domain, const PrescribedCurvature& H_in, int n, double s0,
                                     double eps) {
    if (n < 2) throw Error("dimension n must be at least 2");
    if (!(eps > 0.0)) throw Error("epsilon must be positive");
    const PrescribedCurvature H = bound_to(H_in, domain);
    NonexistenceBound out;
    const BoundarySample y = domain.boundary_at(s0);
    out.y0 = y.point;
    out.normal = y.normal;
    out.s0 = y.s;
    out.kappa0 = y.curvature;
    out.H0 = H(y.point);
    if (!((n - 1) * out.kappa0 < n * out.H0)) {
        std::ostringstream os;
        os << "non-existence bound not applicable: (n-1) kappa(y0) = " << (n - 1) * out.kappa0
           << " >= n H(y0) = " << n * out.H0;
        throw NotApplicableError(os.str());
    }
    BarrierParams& P = out.params;
    P.n = n;
    P.eps = eps;
    P.delta = domain.diameter();
    P.nu_ne = (n * out.H0 - (n - 1) * out.kappa0) / 8.0;
    const double nu = P.nu_ne;
    const Vec2 y0 = out.y0;
    const Vec2 N = out.normal;
    const Vec2 T = perp(N);

    // R1: modulus of continuity of H, H >= 0 and a connected circle trace.
    auto r1_ok = [&](double R) {
        for (int j = 1; j <= 24; ++j) {
            for (int m = 0; m < 96; ++m) {
                const double ang = 2 * kPi * m / 96.0;
                const Vec2 x = y0 + Vec2{std::cos(ang), std::sin(ang)} * (R * j / 24.0);
                if (!domain.contains(x)) continue;
                const double h = H(x);
                if (h < 0.0 || !(std::abs(h - out.H0) < nu / n)) return false;
            }
        }
        for (const BoundarySample& b : domain.boundary_samples()) {
            if (distance(b.point, y0) >= R) continue;
            const double h = H(b.point);
            if (h < 0.0 || !(std::abs(h - out.H0) < nu / n)) return false;
        }
        int transitions = 0;
        int inside = 0;
        const int count = 720;
        bool prev = domain.contains(y0 + Vec2{R, 0.0});
        for (int m = 1; m <= count; ++m) {
            const double ang = 2 * kPi * m / count;
            const bool in = domain.contains(y0 + Vec2{std::cos(ang), std::sin(ang)} * R);
            inside += in ? 1 : 0;
            transitions += in != prev ? 1 : 0;
            prev = in;
        }
        return inside > 0 && transitions <= 2;
    };
    double R = P.delta;
    for (int it = 0; it < 80 && !r1_ok(R); ++it) R *= 0.5;
    P.R1 = R;

    // Tangent circle S and its strip.
    P.kappa_S = out.kappa0 + nu / (2.0 * (n - 1));
    const double kS = P.kappa_S;
    out.S_center = kS != 0.0 ? y0 + N / kS : y0;
    out.S_inside = true;
    const double arc = kS != 0.0 ? std::min(P.R1, 0.5 * kPi / std::abs(kS)) : P.R1;
    for (int m = -40; m <= 40; ++m) {
        const double sig = arc * m / 40.0;
        const Vec2 p = kS != 0.0 ? out.S_center - N * (std::cos(kS * sig) / kS) + T * (std::sin(kS * sig) / kS)
                                 : y0 + T * sig;
        if (domain.signed_distance(p) < -1e-9) out.S_inside = false;
    }
    if (!out.S_inside) out.warnings.push_back("tangent circle S leaves the domain near y0");
    const DistanceSource src = DistanceSource::quadric(y0, N, kS);
    const double tau_S = kS > 0.0 ? 1.0 / kS : P.delta;

    // R2: |Lap d(x) - Lap d(y0)| < nu on B_R2 within the strip of S.
    const double lap_y0 = -(n - 1) * kS;
    auto r2_samples = [&](double R2, auto&& f) {
        for (int j = 1; j <= 24; ++j)
            for (int m = 0; m < 96; ++m) {
                const double ang = 2 * kPi * m / 96.0;
                const Vec2 x = y0 + Vec2{std::cos(ang), std::sin(ang)} * (R2 * j / 24.0);
                if (!domain.contains(x)) continue;
                const DistanceJet dj = src.evaluate(domain, x);
                if (!dj.valid || dj.d < 0.0 || dj.d >= tau_S) continue;
                f(x, dj);
            }
    };
    R = 0.999 * std::min(tau_S, P.R1);
    for (int it = 0; it < 80; ++it) {
        bool ok = true;
        r2_samples(R, [&](Vec2, const DistanceJet& dj) {
            const double lap = -(n - 1) * kS / (1.0 - dj.d * kS);
            if (!(std::abs(lap - lap_y0) < nu)) ok = false;
        });
        if (ok) break;
        R *= 0.5;
    }
    P.R2 = R;
    out.min_key_inequality = kInf;
    r2_samples(P.R2, [&](Vec2 x, const DistanceJet& dj) {
        const double lap = -(n - 1) * kS / (1.0 - dj.d * kS);
        out.min_key_inequality = std::min(out.min_key_inequality, lap + n * H(x) - nu);
    });

    // Solve psi(a) + sqrt(2a/nu) < eps, bisecting on L = log(delta/a).
    const double delta = P.delta;
    const double c = std::sqrt(2.0 / (n - 1));
    auto psi_a_of = [&](double L) { return c * 2.0 * delta * dawson(std::sqrt(L)); };
    auto sqrt_of = [&](double L) { return std::exp(0.5 * (std::log(2.0 * delta / nu) - L)); };
    auto g = [&](double L) { return psi_a_of(L) + sqrt_of(L) - eps; };
    double L_lo = std::log(delta / P.R2);
    double L_hi = L_lo;
    if (g(L_lo) < 0.0) {
        L_hi = L_lo * (1.0 + 1e-12) + 1e-12;
    } else {
        L_hi = std::max(1.0, 2.0 * L_lo);
        while (g(L_hi) >= 0.0) {
            L_lo = L_hi;
            L_hi *= 2.0;
            if (L_hi > 1e12) throw Error("non-existence bound: no admissible radius found");
        }
        for (int it = 0; it < 200 && L_hi - L_lo > 1e-13 * L_hi; ++it) {
            const double mid = 0.5 * (L_lo + L_hi);
            (g(mid) < 0.0 ? L_hi : L_lo) = mid;
        }
    }
    P.log_a_ne = std::log(delta) - L_hi;
    P.a_ne = std::exp(static_cast<long double>(P.log_a_ne));
    out.psi_a = psi_a_of(L_hi);
    out.sqrt_term = sqrt_of(L_hi);
    out.total = out.psi_a + out.sqrt_term;
    if (P.log_a_ne < std::log(DBL_MIN)) {
        std::ostringstream os;
        os << "radius a = exp(" << P.log_a_ne << ") is below double precision range and far below any grid spacing";
        out.warnings.push_back(os.str());
    }

    // Step-1 barrier sign on Omega_e for a probe radius (any a < R2 is admissible).
    const double a_probe = 0.5 * P.R2;
    const double e_probe = 0.25 * a_probe;
    out.step1_probe_a = a_probe;
    out.step1_max_Q = -kInf;
    const Profile phi1 = nonexistence_phi_profile(nu, a_probe, e_probe);
    for (int j = 1; j <= 20; ++j)
        for (int m = 0; m < 72; ++m) {
            const double ang = 2 * kPi * m / 72.0;
            const Vec2 x = y0 + Vec2{std::cos(ang), std::sin(ang)} * (a_probe * j / 20.0 * 0.999);
            if (!domain.contains(x)) continue;
            const DistanceJet dj = src.evaluate(domain, x);
            if (!dj.valid || !(dj.d > e_probe) || dj.d >= a_probe) continue;
            const TransformedPoint tp = transform_point(x, phi1, {}, src, domain, H, n);
            if (!tp.valid) continue;
            ++out.step1_samples;
            out.step1_max_Q = std::max(out.step1_max_Q, tp.Qw);
        }

    // Step-2 barrier sign on the domain minus B_a (sampled on a polar lattice).
    out.step2_max_Q = -kInf;
    const Profile psi2 = nonexistence_psi_profile(P.log_a_ne, delta, n);
    for (int j = 1; j <= 40; ++j) {
        const double rho = delta * std::pow(1e-4, 1.0 - j / 40.0) * 0.999;
        for (int m = 0; m < 72; ++m) {
            const double ang = 2 * kPi * m / 72.0;
            const Vec2 x = y0 + Vec2{std::cos(ang), std::sin(ang)} * rho;
            if (!domain.contains(x)) continue;
            const TransformedPoint tp = transform_point(x, psi2, {}, DistanceSource::radial(y0), domain, H, n);
            if (!tp.valid) continue;
            ++out.step2_samples;
            out.step2_max_Q = std::max(out.step2_max_Q, tp.Qw);
        }
    }
    P.notes.push_back("nu_ne = (n H(y0) - (n-1) kappa(y0)) / 8");
    P.notes.push_back("step-1 barrier sign checked with probe radius R2/2; the argument holds for every a < R2");
    return out;
}

BoundaryData adversarial_boundary_data(const Domain& domain, double s0, double log_a, double eps) {
    return BoundaryData::bump(domain, s0, log_a, eps);
}

WitnessResult nonexistence_witness(const std::vector<AdversarialRun>& runs, const WitnessSetup& setup,
                                   const BoundaryData& phi) {
    if (runs.size() < 2) throw InsufficientRefinementsError("non-existence witness needs at least two refinements");
    WitnessResult r;
    const AdversarialRun& coarse = runs[runs.size() - 2];
    const AdversarialRun& fine = runs.back();
    r.ball_radius = std::max(0.5 * std::exp(setup.log_a), 2.0 * coarse.report.h);
    for (const AdversarialRun& run : runs)
        if (run.report.verdict == Verdict::diverged_gradient || run.report.verdict == Verdict::stagnated)
            r.divergent = true;

    auto finite_field = [](const ScalarField& u) {
        for (int id : u.grid().interior_nodes())
            if (!std::isfinite(u.node(id))) return false;
        return true;
    };
    for (const AdversarialRun& run : runs) {
        const ScalarField& u = run.u;
        if (!finite_field(u)) {
            r.local_gradient.push_back(kInf);
            continue;
        }
        const Grid& g = u.grid();
        double m = 0.0;
        const auto nodes = g.interior_nodes();
        for (std::size_t k = 0; k < nodes.size(); ++k)
            if (distance(g.position(nodes[k]), setup.y0) <= r.ball_radius)
                m = std::max(m, norm(node_derivatives(u, static_cast<int>(k)).grad));
        const std::vector<Vec2> bg = boundary_gradient(u);
        for (std::size_t k = 0; k < bg.size(); ++k)
            if (distance(g.feet()[k].point, setup.y0) <= r.ball_radius) m = std::max(m, norm(bg[k]));
        r.local_gradient.push_back(m);
    }
    const double lg_c = r.local_gradient[runs.size() - 2];
    const double lg_f = r.local_gradient.back();
    r.gradient_ratio = lg_c > 0.0 ? lg_f / lg_c : (lg_f > 0.0 ? kInf : 1.0);

    if (finite_field(fine.u)) {
        const Grid& g = fine.u.grid();
        const auto feet = g.feet();
        r.trace_at_y0 = -kInf;
        r.trace_outside = -kInf;
        for (std::size_t k = 0; k < feet.size(); ++k) {
            const double val = fine.u.foot(static_cast<int>(k));
            if (distance(feet[k].point, setup.y0) <= g.h()) r.trace_at_y0 = std::max(r.trace_at_y0, val);
            const double rho = g.domain().arclength_distance(feet[k].s, setup.s0);
            if (rho > 0.0 && std::log(rho) >= setup.log_a) r.trace_outside = std::max(r.trace_outside, val);
            r.data_attainment_error =
                std::max(r.data_attainment_error, std::abs(val - phi(feet[k].point, feet[k].s)));
        }
        r.trace_violation = r.trace_at_y0 > r.trace_outside + setup.eps - 0.01 * setup.eps;
    } else {
        r.trace_violation = true;
    }

    const bool growth = r.divergent || r.gradient_ratio >= 1.5;
    r.witness = setup.certificate_applicable && r.trace_violation && growth;
    r.verdict = r.witness ? "WITNESS" : "NO-WITNESS";
    std::ostringstream os;
    os << "certificate " << (setup.certificate_applicable ? "applicable" : "not applicable") << "; trace "
       << (r.trace_violation ? "violates" : "respects") << " the certified bound; "
       << (r.divergent ? "a run diverged or stagnated" : "all runs converged") << "; local gradient ratio "
       << r.gradient_ratio;
    r.explanation = os.str();
    return r;
}

} // namespace mcgraph
