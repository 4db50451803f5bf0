#include "mcgraph/scenario.hpp"

#include "mcgraph/operators.hpp"
#include "mcgraph/output.hpp"

#include <chrono>
#include <filesystem>
#include <limits>
#include <sstream>

namespace mcgraph {

using json = nlohmann::ordered_json;

namespace {

// JSON has no infinity; such values are written as strings.
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json vec(Vec2 p) { return json::array({num(p.x), num(p.y)}); }

json to_json(const EstimateAudit& a) {
    return {{"name", a.name},     {"bound", num(a.bound)},         {"measured", num(a.measured)},
            {"margin", num(a.margin)}, {"tolerance", num(a.tolerance)}, {"pass", a.pass},
            {"note", a.note}};
}

ConfigError key_error(const Config& cfg, const std::string& section, const std::string& key, const std::string& what) {
    const int line = cfg.line(section, key);
    std::ostringstream os;
    os << "invalid value for '" << section << "." << key << "'";
    if (line > 0) os << " (line " << line << ")";
    os << ": " << what;
    return ConfigError(os.str(), section + "." + key, line);
}

Vec2 point(const Config& cfg, const std::string& section, const std::string& key, Vec2 fallback) {
    if (!cfg.has(section, key)) return fallback;
    const std::vector<double> v = cfg.numbers(section, key);
    if (v.size() != 2) throw key_error(cfg, section, key, "expected two numbers x, y");
    return {v[0], v[1]};
}

double positive(const Config& cfg, const std::string& section, const std::string& key, double fallback) {
    const double v = cfg.number(section, key, fallback);
    if (!(v > 0.0)) throw key_error(cfg, section, key, "must be positive");
    return v;
}

Expression expression(const Config& cfg, const std::string& section, const std::string& key) {
    try {
        return Expression::parse(cfg.string(section, key));
    } catch (const ExpressionError& e) {
        throw key_error(cfg, section, key, e.what());
    }
}

template <class F>
auto guarded(const Config& cfg, const std::string& section, const std::string& key, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw key_error(cfg, section, key, e.what());
    }
}

} // namespace

std::vector<std::string> audit_names() {
    return {"height", "global_gradient", "boundary_gradient", "height_barrier", "comparison", "nonexistence"};
}

Domain load_domain(const Config& cfg, std::string* description) {
    cfg.require_section("domain");
    cfg.require_known("domain", {"shape", "center", "radius", "a", "b", "half_x", "half_y", "corner_radius",
                                 "neck_curvature", "expr", "bbox", "samples"});
    const std::string shape = cfg.string("domain", "shape");
    const Vec2 c = point(cfg, "domain", "center", {});
    const int samples = cfg.integer("domain", "samples", kDefaultBoundarySamples);
    if (samples < 16) throw key_error(cfg, "domain", "samples", "at least 16 boundary samples are needed");
    std::ostringstream os;
    os.precision(12);
    Domain d = guarded(cfg, "domain", "shape", [&]() -> Domain {
        if (shape == "disk") {
            const double r = positive(cfg, "domain", "radius", 1.0);
            os << "disk(center=(" << c.x << "," << c.y << "), radius=" << r << ")";
            return Domain::disk(r, c, samples);
        }
        if (shape == "ellipse") {
            const double a = positive(cfg, "domain", "a", 2.0);
            const double b = positive(cfg, "domain", "b", 1.0);
            os << "ellipse(center=(" << c.x << "," << c.y << "), a=" << a << ", b=" << b << ")";
            return Domain::ellipse(a, b, c, samples);
        }
        if (shape == "rounded_rect") {
            const double hx = positive(cfg, "domain", "half_x", 1.0);
            const double hy = positive(cfg, "domain", "half_y", 1.0);
            const double r = cfg.number("domain", "corner_radius", 0.0);
            if (r < 0.0 || r > std::min(hx, hy)) throw key_error(cfg, "domain", "corner_radius", "must lie in [0, min(half_x, half_y)]");
            os << "rounded_rect(center=(" << c.x << "," << c.y << "), half_x=" << hx << ", half_y=" << hy
               << ", corner_radius=" << r << ")";
            return Domain::rounded_rect(hx, hy, r, c, samples);
        }
        if (shape == "dumbbell") {
            const double k = cfg.number("domain", "neck_curvature", -2.0);
            os << "dumbbell(neck_curvature=" << k << ")";
            return Domain::dumbbell(k, samples);
        }
        if (shape == "levelset") {
            const Expression g = expression(cfg, "domain", "expr");
            const std::vector<double> b = cfg.numbers("domain", "bbox");
            if (b.size() != 4 || !(b[2] > b[0] && b[3] > b[1]))
                throw key_error(cfg, "domain", "bbox", "expected xmin, ymin, xmax, ymax");
            os << "levelset(" << g.text() << ")";
            return Domain::level_set(g, Box{{b[0], b[1]}, {b[2], b[3]}}, samples);
        }
        throw key_error(cfg, "domain", "shape",
                        "unknown shape '" + shape + "' (disk, ellipse, rounded_rect, dumbbell, levelset)");
    });
    if (description) *description = os.str();
    return d;
}

PrescribedCurvature load_curvature(const Config& cfg) {
    cfg.require_known("curvature", {"kind", "value", "expr", "box", "nx", "ny", "values"});
    const std::string kind = cfg.string("curvature", "kind", cfg.has("curvature", "expr") ? "expression" : "constant");
    return guarded(cfg, "curvature", "kind", [&]() -> PrescribedCurvature {
        if (kind == "constant") return PrescribedCurvature::constant(cfg.number("curvature", "value"));
        if (kind == "expression") return PrescribedCurvature::expression(expression(cfg, "curvature", "expr"));
        if (kind == "tabulated") {
            const std::vector<double> b = cfg.numbers("curvature", "box");
            if (b.size() != 4) throw key_error(cfg, "curvature", "box", "expected xmin, ymin, xmax, ymax");
            return PrescribedCurvature::tabulated(Box{{b[0], b[1]}, {b[2], b[3]}}, cfg.integer("curvature", "nx", 0),
                                                  cfg.integer("curvature", "ny", 0), cfg.numbers("curvature", "values"));
        }
        throw key_error(cfg, "curvature", "kind", "unknown kind '" + kind + "' (constant, expression, tabulated)");
    });
}

Scenario load_scenario(const Config& cfg) {
    for (const std::string& s : cfg.sections())
        if (s != "domain" && s != "curvature" && s != "boundary" && s != "reference" && s != "grid" && s != "solver" &&
            s != "audits" && s != "output" && s != "estimates" && s != "sweep")
            throw ConfigError("unknown section [" + s + "] (line " + std::to_string(cfg.section_line(s)) + ")", s,
                              cfg.section_line(s));
    Scenario sc;
    // Where the artifacts go does not change the problem.
    sc.config_hash = fnv1a_hex(cfg.canonical({"output"}));
    sc.domain = load_domain(cfg, &sc.domain_text);

    if (cfg.has_section("reference")) {
        cfg.require_known("reference", {"name", "radius", "rim", "neck"});
        std::map<std::string, double> params;
        for (const char* k : {"radius", "rim", "neck"})
            if (cfg.has("reference", k)) params[k] = cfg.number("reference", k);
        sc.reference = guarded(cfg, "reference", "name",
                               [&] { return make_reference(cfg.string("reference", "name"), params); });
    }

    if (cfg.has_section("curvature")) sc.H = load_curvature(cfg);
    else if (sc.reference) sc.H = sc.reference->curvature();
    else throw ConfigError("missing section [curvature] (or a [reference] providing H)", "curvature", 0);

    cfg.require_known("boundary", {"kind", "expr", "s0", "y0", "eps", "log_radius", "radius_from_h"});
    sc.boundary_kind = cfg.string("boundary", "kind", sc.reference ? "reference" : "zero");
    const std::string& bk = sc.boundary_kind;
    if (bk == "zero") {
        sc.phi = BoundaryData::zero();
    } else if (bk == "expression") {
        const Expression e = expression(cfg, "boundary", "expr");
        sc.phi = BoundaryData::expression(e, e.text());
    } else if (bk == "scherk") {
        sc.phi = BoundaryData::scherk();
    } else if (bk == "reference") {
        if (!sc.reference) throw key_error(cfg, "boundary", "kind", "'reference' needs a [reference] section");
        sc.phi = sc.reference->trace();
    } else if (bk == "bump") {
        BumpSpec b;
        b.eps = positive(cfg, "boundary", "eps", 0.05);
        if (cfg.has("boundary", "y0")) {
            const BoundarySample y = sc.domain.nearest_boundary(point(cfg, "boundary", "y0", {}));
            b.s0 = y.s;
        } else {
            b.s0 = cfg.number("boundary", "s0", 0.0);
        }
        b.y0 = sc.domain.boundary_at(b.s0).point;
        b.s0 = sc.domain.boundary_at(b.s0).s;
        if (cfg.has("boundary", "log_radius")) b.log_radius = cfg.number("boundary", "log_radius");
        if (cfg.has("boundary", "radius_from_h")) b.radius_from_h = cfg.number("boundary", "radius_from_h");
        if (!b.log_radius) {
            const PrescribedCurvature Hc =
                b.radius_from_h ? PrescribedCurvature::constant(*b.radius_from_h) : sc.H;
            try {
                b.log_radius = nonexistence_bound(sc.domain, Hc, cfg.integer("solver", "n", 2), b.s0, b.eps)
                                   .params.log_a_ne;
            } catch (const NotApplicableError& e) {
                throw key_error(cfg, "boundary", "radius_from_h",
                                std::string(e.what()) + "; give boundary.radius_from_h or boundary.log_radius");
            }
        }
        sc.phi = guarded(cfg, "boundary", "log_radius",
                         [&] { return adversarial_boundary_data(sc.domain, b.s0, *b.log_radius, b.eps); });
        sc.bump = b;
    } else {
        throw key_error(cfg, "boundary", "kind", "unknown kind '" + bk + "' (zero, expression, scherk, bump, reference)");
    }

    cfg.require_known("grid", {"h"});
    sc.spacings = cfg.has("grid", "h") ? cfg.numbers("grid", "h") : std::vector<double>{1.0 / 64};
    if (sc.spacings.empty()) throw key_error(cfg, "grid", "h", "needs at least one spacing");
    for (std::size_t k = 0; k < sc.spacings.size(); ++k) {
        if (!(sc.spacings[k] > 0.0)) throw key_error(cfg, "grid", "h", "spacings must be positive");
        if (k > 0 && !(sc.spacings[k] < sc.spacings[k - 1]))
            throw key_error(cfg, "grid", "h", "spacings must be strictly decreasing");
    }

    cfg.require_known("solver", {"n", "tol_update", "tol_residual", "max_iters", "damping", "damping_floor",
                                 "tau_schedule", "gradient_cap", "stagnation_window"});
    SolveConfig& s = sc.solver;
    s.n = cfg.integer("solver", "n", s.n);
    s.tol_update = cfg.number("solver", "tol_update", s.tol_update);
    if (cfg.has("solver", "tol_residual")) s.tol_residual = cfg.number("solver", "tol_residual");
    s.max_iters = cfg.integer("solver", "max_iters", s.max_iters);
    s.damping = cfg.number("solver", "damping", s.damping);
    s.damping_floor = cfg.number("solver", "damping_floor", std::min(s.damping_floor, s.damping));
    if (cfg.has("solver", "tau_schedule")) s.tau_schedule = cfg.numbers("solver", "tau_schedule");
    s.gradient_cap = cfg.number("solver", "gradient_cap", s.gradient_cap);
    s.stagnation_window = cfg.integer("solver", "stagnation_window", s.stagnation_window);
    guarded(cfg, "solver", "n", [&] {
        s.validate();
        return 0;
    });

    cfg.require_known("audits", {"names"});
    if (cfg.has("audits", "names")) {
        const std::vector<std::string> known = audit_names();
        for (const std::string& a : cfg.strings("audits", "names")) {
            if (std::find(known.begin(), known.end(), a) == known.end())
                throw key_error(cfg, "audits", "names", "unknown audit '" + a + "'");
            sc.audits.push_back(a);
        }
    }

    cfg.require_known("output", {"dir", "write_matrix"});
    sc.output_dir = cfg.string("output", "dir", sc.output_dir);
    sc.write_matrix = cfg.integer("output", "write_matrix", 0) != 0;
    cfg.require_known("estimates", {"u_sup"});
    if (cfg.has("estimates", "u_sup")) sc.estimate_u_sup = cfg.number("estimates", "u_sup");
    return sc;
}

// ----------------------------------------------------------------------------

namespace {

json params_json(const BarrierParams& p) {
    json j;
    j["n"] = p.n;
    j["mu"] = num(p.mu);
    j["delta"] = num(p.delta);
    j["mu_limit"] = p.mu_limit;
    j["tau"] = num(p.tau);
    j["d_c2"] = num(p.d_c2);
    j["H_c1"] = num(p.H_c1);
    j["phi_c0"] = num(p.phi_c0);
    j["phi_c1"] = num(p.phi_c1);
    j["phi_c2"] = num(p.phi_c2);
    j["C"] = num(p.C);
    j["nu"] = num(p.nu);
    j["M"] = num(p.M);
    j["log_k"] = num(p.log_k);
    j["a"] = num(p.a);
    j["psi_prime0"] = num(p.psi_prime0);
    j["boundary_gradient_bound"] = num(p.boundary_gradient_bound);
    j["A"] = num(p.A);
    j["notes"] = p.notes;
    return j;
}

json nonexistence_json(const NonexistenceBound& nb) {
    const BarrierParams& p = nb.params;
    json j;
    j["y0"] = vec(nb.y0);
    j["s0"] = num(nb.s0);
    j["kappa0"] = num(nb.kappa0);
    j["H0"] = num(nb.H0);
    j["eps"] = num(p.eps);
    j["nu_ne"] = num(p.nu_ne);
    j["R1"] = num(p.R1);
    j["R2"] = num(p.R2);
    j["kappa_S"] = num(p.kappa_S);
    j["S_center"] = vec(nb.S_center);
    j["S_inside"] = nb.S_inside;
    j["log_a"] = num(p.log_a_ne);
    std::ostringstream a;
    a.precision(10);
    a << p.a_ne;
    j["a"] = a.str();
    j["psi_a"] = num(nb.psi_a);
    j["sqrt_term"] = num(nb.sqrt_term);
    j["total"] = num(nb.total);
    j["step1_probe_a"] = num(nb.step1_probe_a);
    j["step1_max_Q"] = num(nb.step1_max_Q);
    j["step1_samples"] = nb.step1_samples;
    j["step2_max_Q"] = num(nb.step2_max_Q);
    j["step2_samples"] = nb.step2_samples;
    j["min_key_inequality"] = num(nb.min_key_inequality);
    j["notes"] = p.notes;
    j["warnings"] = nb.warnings;
    return j;
}

bool certificate_ok(const NonexistenceBound& nb) {
    return nb.total < nb.params.eps && nb.S_inside && nb.step1_max_Q < 0.0 && nb.step2_max_Q < 0.0 &&
           nb.min_key_inequality > 0.0;
}

json run_json(const ScenarioRun& r) {
    const SolveReport& rep = r.solve.report;
    json j;
    j["h"] = r.h;
    j["verdict"] = to_string(rep.verdict);
    j["message"] = rep.message;
    int iters = 0;
    json stages = json::array();
    for (const StageSummary& s : rep.stages) {
        iters += s.iterations;
        stages.push_back({{"tau", s.tau},
                          {"iterations", s.iterations},
                          {"converged", s.converged},
                          {"residual", num(s.residual)},
                          {"update", num(s.update)}});
    }
    j["iterations"] = iters;
    j["stages"] = stages;
    j["interior_nodes"] = r.solve.u.grid().interior_count();
    j["boundary_feet"] = r.solve.u.grid().feet().size();
    j["cross_first_order_nodes"] = rep.cross_first_order_nodes;
    j["residual"] = num(rep.residual);
    j["collar_residual"] = num(rep.collar_residual);
    j["condition_estimate"] = num(rep.condition_estimate);
    j["linear_method"] = rep.linear_method;
    j["m_matrix"] = {{"is_m_matrix", rep.m_matrix.is_m_matrix},
                     {"violating_rows", rep.m_matrix.violating_rows},
                     {"max_violation", num(rep.m_matrix.max_violation)}};
    j["u_sup"] = num(rep.u_sup);
    j["grad_sup"] = num(rep.grad_sup);
    j["boundary_grad_sup"] = num(rep.boundary_grad_sup);
    if (r.reference_error) j["reference_error"] = num(*r.reference_error);
    json audits = json::array();
    for (const EstimateAudit& a : rep.audits) audits.push_back(to_json(a));
    j["audits"] = audits;
    j["wall_time"] = rep.wall_time;
    return j;
}

json scenario_json(const Scenario& sc) {
    json j;
    j["domain"] = sc.domain_text;
    j["curvature"] = sc.H.describe();
    j["boundary"] = sc.boundary_kind;
    if (sc.bump) {
        j["bump"] = {{"y0", vec(sc.bump->y0)},
                     {"s0", num(sc.bump->s0)},
                     {"eps", num(sc.bump->eps)},
                     {"log_radius", num(*sc.bump->log_radius)}};
        if (sc.bump->radius_from_h) j["bump"]["radius_from_h"] = *sc.bump->radius_from_h;
    }
    if (sc.reference) j["reference"] = sc.reference->name;
    j["spacings"] = sc.spacings;
    const SolveConfig& s = sc.solver;
    j["solver"] = {{"n", s.n},
                   {"tol_update", s.tol_update},
                   {"tol_residual", num(s.residual_target(sc.H.bind(sc.domain)))},
                   {"max_iters", s.max_iters},
                   {"damping", s.damping},
                   {"damping_floor", s.damping_floor},
                   {"tau_schedule", s.tau_schedule},
                   {"gradient_cap", s.gradient_cap},
                   {"stagnation_window", s.stagnation_window}};
    j["audits"] = sc.audits;
    return j;
}

bool requested(const Scenario& sc, const std::string& name) {
    return std::find(sc.audits.begin(), sc.audits.end(), name) != sc.audits.end();
}

} // namespace

json estimates_ledger(const Scenario& sc, std::vector<std::string>* refusals) {
    const PrescribedCurvature H = sc.H.bind(sc.domain);
    const int n = sc.solver.n;
    json j;
    const HeightConstants hc = height_constants(sc.domain, H, n);
    const DataNorms dn = sc.phi.norms(sc.domain);
    const EstimateAudit hb = height_bound(sc.domain, H, n, dn.c0);
    j["height"] = {{"mu", num(hc.mu)},
                   {"delta", num(hc.delta)},
                   {"limit", hc.limit},
                   {"growth", num(hc.growth())},
                   {"boundary_sup", num(dn.c0)},
                   {"bound", num(hb.bound)},
                   {"note", hb.note}};
    const double u_sup = sc.estimate_u_sup ? *sc.estimate_u_sup : hb.bound;
    const SerrinAudit serrin = check_serrin(sc.domain, H, n);
    j["serrin"] = {{"satisfied", serrin.satisfied}, {"margin", num(serrin.margin)}, {"worst_point", vec(serrin.worst_point)}};
    try {
        const BoundaryGradientPackage pkg = boundary_gradient_package(sc.domain, H, n, sc.phi, u_sup);
        json b = params_json(pkg.params);
        b["u_sup_used"] = num(u_sup);
        b["constants_ok"] = pkg.constants_ok;
        b["max_Q_plus"] = num(pkg.max_Q_plus);
        b["min_Q_minus"] = num(pkg.min_Q_minus);
        b["sign_samples"] = pkg.sign_samples;
        b["signs_ok"] = pkg.signs_ok;
        j["boundary_gradient"] = b;
    } catch (const RefusedError& e) {
        j["boundary_gradient"] = {{"refused", e.what()}};
        if (refusals) refusals->push_back(e.what());
    }
    j["global_gradient"] = {{"A", num(1.0 + 8.0 * n * H.c1_norm())}, {"H_c1", num(H.c1_norm())}};
    const double s0 = sc.bump ? sc.bump->s0 : 0.0;
    const double eps = sc.bump ? sc.bump->eps : 0.05;
    try {
        const NonexistenceBound nb = nonexistence_bound(sc.domain, H, n, s0, eps);
        j["nonexistence"] = nonexistence_json(nb);
        j["nonexistence"]["certified"] = certificate_ok(nb);
    } catch (const NotApplicableError& e) {
        j["nonexistence"] = {{"not_applicable", e.what()}};
    }
    return j;
}

ScenarioResult run_scenario(const Scenario& sc) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioResult res;
    const PrescribedCurvature H = sc.H.bind(sc.domain);
    const int n = sc.solver.n;
    SolveConfig cfg = sc.solver;
    cfg.keep_stage_fields = requested(sc, "comparison");

    for (double h : sc.spacings) {
        ScenarioRun run{h, solve_dirichlet(Grid::build(sc.domain, h), H, sc.phi, cfg), std::nullopt};
        if (sc.reference && run.solve.report.verdict == Verdict::converged) {
            double err = 0.0;
            const Grid& g = run.solve.u.grid();
            for (int id : g.interior_nodes())
                err = std::max(err, std::abs(run.solve.u.node(id) - sc.reference->u(g.position(id))));
            run.reference_error = err;
        }
        for (const EstimateAudit& a : run.solve.report.audits) res.audits.push_back(a);
        res.runs.push_back(std::move(run));
    }

    bool all_converged = true;
    for (const ScenarioRun& r : res.runs) all_converged = all_converged && r.solve.report.verdict == Verdict::converged;
    const ScenarioRun& fine = res.runs.back();
    const bool fine_ok = fine.solve.report.verdict == Verdict::converged;

    json extras = json::object();
    if (fine_ok && requested(sc, "boundary_gradient")) {
        try {
            const BoundaryGradientPackage pkg =
                boundary_gradient_package(sc.domain, H, n, sc.phi, fine.solve.report.u_sup, &fine.solve.u);
            res.audits.push_back(pkg.bound);
            res.audits.push_back(make_audit("boundary_gradient_barrier_signs", 0.0,
                                            std::max(pkg.max_Q_plus, -pkg.min_Q_minus), 0.0,
                                            "max of Q w+ and -Q w- over the strip samples"));
            res.audits.push_back(make_audit("boundary_gradient_sandwich", 0.0, pkg.sandwich_violation, 0.0,
                                            "w- <= u <= w+ + 1e-6 on the strip nodes"));
            if (!pkg.constants_ok) res.audits.push_back(make_audit("boundary_gradient_constants", 0.0, 1.0, 0.0, "a < 1/nu < tau fails"));
            json b = params_json(pkg.params);
            b["sign_samples"] = pkg.sign_samples;
            b["sandwich_nodes"] = pkg.sandwich_nodes;
            extras["boundary_gradient"] = b;
        } catch (const RefusedError& e) {
            res.notes.push_back(e.what());
        }
    }
    if (fine_ok && requested(sc, "height_barrier")) {
        const BarrierCheck bc = height_barrier(fine.solve.u.grid(), H, n, fine.solve.u.max_abs_boundary());
        res.audits.push_back(make_audit("height_barrier_sign", 0.0, bc.max_Q, 0.0, "max of Q w over the checked nodes"));
        const ComparisonResult cr = comparison_check(fine.solve.u, bc.w, H, n, 1e-9);
        if (cr.verdict == ComparisonVerdict::not_applicable) res.notes.push_back("height barrier comparison: " + cr.message);
        else res.audits.push_back(make_audit("height_barrier_comparison", cr.tolerance, cr.max_excess, 0.0, cr.message));
    }
    if (fine_ok && requested(sc, "comparison")) {
        const auto& st = fine.solve.stage_fields;
        for (std::size_t k = 1; k < st.size(); ++k) {
            const ComparisonResult cr = comparison_check(st[k], st[k - 1], H, n, 1e-9);
            std::ostringstream name;
            name << "continuation_comparison_tau_" << sc.solver.tau_schedule[k];
            if (cr.verdict == ComparisonVerdict::not_applicable) res.notes.push_back(name.str() + ": " + cr.message);
            else res.audits.push_back(make_audit(name.str(), cr.tolerance, cr.max_excess, 0.0, cr.message));
        }
    }
    std::optional<NonexistenceBound> certificate;
    std::string certificate_note;
    if (sc.bump || requested(sc, "nonexistence")) {
        try {
            certificate = nonexistence_bound(sc.domain, H, n, sc.bump ? sc.bump->s0 : 0.0, sc.bump ? sc.bump->eps : 0.05);
            extras["nonexistence"] = nonexistence_json(*certificate);
            extras["nonexistence"]["certified"] = certificate_ok(*certificate);
            if (requested(sc, "nonexistence"))
                res.audits.push_back(make_audit("nonexistence_certificate", certificate->params.eps, certificate->total,
                                                0.0, "psi(a) + sqrt(2 a / nu) against eps"));
        } catch (const NotApplicableError& e) {
            certificate_note = e.what();
            res.notes.push_back(e.what());
            extras["nonexistence"] = {{"not_applicable", e.what()}};
        }
    }
    if (sc.bump && res.runs.size() >= 2) {
        WitnessSetup ws;
        ws.y0 = sc.bump->y0;
        ws.s0 = sc.bump->s0;
        ws.log_a = *sc.bump->log_radius;
        ws.eps = sc.bump->eps;
        ws.certificate_applicable = certificate && certificate_ok(*certificate) &&
                                    ws.log_a <= certificate->params.log_a_ne + 1e-9 * std::abs(ws.log_a);
        std::vector<AdversarialRun> runs;
        for (const ScenarioRun& r : res.runs) runs.push_back({r.solve.report, r.solve.u});
        res.witness = nonexistence_witness(runs, ws, sc.phi);
    } else if (sc.bump) {
        res.notes.push_back("non-existence witness needs at least two spacings");
    }

    // Exit code.
    bool audits_pass = true;
    for (const EstimateAudit& a : res.audits) audits_pass = audits_pass && a.pass;
    if (!all_converged) res.exit_code = kExitSolverFailure;
    else if (!audits_pass || (res.witness && res.witness->witness)) res.exit_code = kExitAuditFailure;
    else res.exit_code = kExitOk;

    // Report.
    json& rep = res.report;
    rep["schema"] = 1;
    rep["tool"] = "mcgraph";
    rep["config_hash"] = "fnv1a64:" + sc.config_hash;
    rep["scenario"] = scenario_json(sc);
    // The first failing run decides the overall verdict.
    rep["verdict"] = "converged";
    for (const ScenarioRun& r : res.runs)
        if (r.solve.report.verdict != Verdict::converged) {
            rep["verdict"] = to_string(r.solve.report.verdict);
            break;
        }
    if (res.witness) rep["nonexistence_witness"] = res.witness->verdict;
    json runs = json::array();
    for (const ScenarioRun& r : res.runs) runs.push_back(run_json(r));
    rep["runs"] = runs;
    if (sc.reference) {
        json ref;
        ref["name"] = sc.reference->name;
        ref["description"] = sc.reference->description;
        ref["self_test_ratio"] = num(sc.reference->self_test_ratio);
        json errs = json::array();
        json ratios = json::array();
        for (std::size_t k = 0; k < res.runs.size(); ++k) {
            const auto& e = res.runs[k].reference_error;
            errs.push_back(e ? num(*e) : json(nullptr));
            if (k > 0) {
                const auto& p = res.runs[k - 1].reference_error;
                ratios.push_back(e && p && *e > 0.0 ? num(*p / *e) : json(nullptr));
            }
        }
        ref["errors"] = errs;
        ref["ratios"] = ratios;
        rep["reference"] = ref;
    }
    json ledger = estimates_ledger(sc);
    for (auto& [k, v] : extras.items()) ledger[k] = v;
    if (fine_ok) ledger["boundary_gradient_u_sup"] = num(fine.solve.report.u_sup);
    rep["ledger"] = ledger;
    json audits = json::array();
    for (const EstimateAudit& a : res.audits) audits.push_back(to_json(a));
    rep["audits"] = audits;
    rep["notes"] = res.notes;
    if (res.witness) {
        const WitnessResult& w = *res.witness;
        json lg = json::array();
        for (double g : w.local_gradient) lg.push_back(num(g));
        rep["witness"] = {{"verdict", w.verdict},
                                       {"divergent", w.divergent},
                                       {"local_gradient", lg},
                                       {"gradient_ratio", num(w.gradient_ratio)},
                                       {"ball_radius", num(w.ball_radius)},
                                       {"trace_at_y0", num(w.trace_at_y0)},
                                       {"trace_outside", num(w.trace_outside)},
                                       {"trace_violation", w.trace_violation},
                                       {"data_attainment_error", num(w.data_attainment_error)},
                                       {"certificate_note", certificate_note},
                                       {"explanation", w.explanation}};
    }
    rep["exit_code"] = res.exit_code;
    rep["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

void write_artifacts(const Scenario& sc, const ScenarioResult& res, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    {
        std::ofstream out = open_output((base / "report.json").string());
        out << res.report.dump(2) << '\n';
    }
    {
        std::ofstream out = open_output((base / "traces.csv").string());
        write_traces_header(out);
        for (const ScenarioRun& r : res.runs) write_traces_csv(r.h, r.solve.report.traces, out);
    }
    const ScenarioRun& fine = res.runs.back();
    {
        std::ofstream out = open_output((base / "fields.csv").string());
        write_fields_csv(fine.solve.u, out);
    }
    {
        std::ofstream out = open_output((base / "heatmap.svg").string());
        std::ostringstream title;
        title << "u on " << sc.domain_text << ", h = " << fine.h << " (" << to_string(fine.solve.report.verdict) << ")";
        write_heatmap_svg(fine.solve.u, title.str(), out);
    }
    if (sc.write_matrix && fine.solve.report.verdict == Verdict::converged)
        write_matrix_market(assemble(fine.solve.u, sc.H.bind(sc.domain), sc.phi, sc.solver.n, 1.0),
                            (base / "matrix.mtx").string());
}

} // namespace mcgraph
