#include "mcgraph/cli.hpp"

#include "mcgraph/output.hpp"
#include "mcgraph/scenario.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace mcgraph {

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string grid_h;
    std::vector<std::string> sets;
    bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
    auto* opt = app->add_option("-c,--config", c.config, "configuration file");
    if (config_required) opt->required();
    app->add_option("-o,--out", c.out, "output directory (overrides [output] dir)");
    app->add_option("--grid-h", c.grid_h, "grid spacing(s), comma separated (overrides [grid] h)");
    app->add_option("--set", c.sets, "override an entry: section.key=value")->take_all();
    app->add_flag("-q,--quiet", c.quiet, "only print the final summary line");
}

// Bare words are accepted on the command line and treated as strings.
void set_entry(Config& cfg, const std::string& section, const std::string& key, const std::string& raw) {
    try {
        cfg.set(section, key, raw);
    } catch (const ConfigError&) {
        if (raw.find('"') != std::string::npos) throw;
        cfg.set(section, key, '"' + raw + '"');
    }
}

Config load_config(const Common& c) {
    Config cfg = c.config.empty() ? Config::parse("", "command line") : Config::load(c.config);
    for (const std::string& s : c.sets) {
        const auto dot = s.find('.');
        const auto eq = s.find('=');
        if (dot == std::string::npos || eq == std::string::npos || dot > eq)
            throw ConfigError("malformed override '" + s + "' (expected section.key=value)", s, 0);
        set_entry(cfg, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
    }
    if (!c.grid_h.empty()) cfg.set("grid", "h", c.grid_h);
    if (!c.out.empty()) cfg.set("output", "dir", '"' + c.out + '"');
    return cfg;
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

void print_run_summary(const Scenario& sc, const ScenarioResult& res, bool quiet, std::ostream& out) {
    if (!quiet) {
        out << "domain    " << sc.domain_text << "\n";
        out << "curvature " << sc.H.describe() << "\n";
        out << "boundary  " << sc.boundary_kind << "\n";
        for (const ScenarioRun& r : res.runs) {
            const SolveReport& rep = r.solve.report;
            int iters = 0;
            for (const StageSummary& s : rep.stages) iters += s.iterations;
            out << "h = " << fmt(r.h) << ": " << to_string(rep.verdict) << ", " << iters << " Picard steps, residual "
                << fmt(rep.residual, 3) << ", sup|u| " << fmt(rep.u_sup) << ", sup|grad u| " << fmt(rep.grad_sup);
            if (r.reference_error) out << ", error " << fmt(*r.reference_error, 4);
            out << "\n";
        }
        for (const EstimateAudit& a : res.audits)
            out << (a.pass ? "  pass " : "  FAIL ") << a.name << ": " << fmt(a.measured) << " <= " << fmt(a.bound)
                << "\n";
        for (const std::string& n : res.notes) out << "  note: " << n << "\n";
        if (res.witness)
            out << "non-existence witness: " << res.witness->verdict << " (" << res.witness->explanation << ")\n";
    }
    out << "verdict " << res.report["verdict"].get<std::string>() << ", exit " << res.exit_code << "\n";
}

int cmd_run(const Common& c, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(load_config(c));
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    try {
        const ScenarioResult res = run_scenario(sc);
        write_artifacts(sc, res, sc.output_dir);
        print_run_summary(sc, res, c.quiet, out);
        if (!c.quiet) out << "artifacts in " << sc.output_dir << "\n";
        return res.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    }
}

int cmd_check_serrin(const Common& c, const std::string& shape, std::optional<double> H, std::optional<int> n,
                     std::ostream& out, std::ostream& err) {
    int dim = 2;
    Domain domain = Domain::disk(1.0);
    std::string text;
    PrescribedCurvature curvature = PrescribedCurvature::constant(0.0);
    try {
        Config cfg = load_config(c);
        if (!shape.empty()) set_entry(cfg, "domain", "shape", shape);
        if (H) {
            cfg.set("curvature", "kind", "\"constant\"");
            cfg.set("curvature", "value", fmt(*H, 17));
        }
        domain = load_domain(cfg, &text);
        if (cfg.has_section("curvature")) curvature = load_curvature(cfg);
        dim = n ? *n : cfg.integer("solver", "n", 2);
        if (dim < 2) throw ConfigError("n must be at least 2", "solver.n", cfg.line("solver", "n"));
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    const SerrinAudit a = check_serrin(domain, curvature.bind(domain), dim);
    out << std::setprecision(12);
    out << "domain " << text << "\n";
    out << "H " << curvature.describe() << ", n = " << dim << "\n";
    out << "Serrin condition (n-1) kappa >= n |H|: " << (a.satisfied ? "satisfied" : "violated") << "\n";
    out << "margin " << a.margin << "\n";
    out << "worst boundary point (" << a.worst_point.x << ", " << a.worst_point.y << "), s = " << a.worst_s << "\n";
    return a.satisfied ? kExitOk : kExitViolated;
}

void print_ledger(const nlohmann::ordered_json& j, const std::string& indent, std::ostream& out) {
    for (const auto& [k, v] : j.items()) {
        if (v.is_object()) {
            out << indent << k << ":\n";
            print_ledger(v, indent + "  ", out);
        } else if (v.is_array()) {
            if (v.empty()) continue;
            out << indent << k << ":";
            for (const auto& item : v) out << (item.is_string() ? "\n" + indent + "  - " + item.get<std::string>() : " " + item.dump());
            out << "\n";
        } else {
            out << indent << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
    }
}

int cmd_estimates(const Common& c, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(load_config(c));
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    std::vector<std::string> refusals;
    const nlohmann::ordered_json ledger = estimates_ledger(sc, &refusals);
    out << "domain " << sc.domain_text << "\n";
    out << "H " << sc.H.describe() << ", n = " << sc.solver.n << "\n";
    print_ledger(ledger, "", out);
    for (const std::string& r : refusals) out << "REFUSED: " << r << "\n";
    return refusals.empty() ? kExitOk : kExitAuditFailure;
}

// ----------------------------------------------------------------------------

struct SweepItem {
    std::string label;
    std::optional<double> H;
    std::optional<double> h;
    Scenario scenario;
};

struct SweepRow {
    int exit_code = 0;
    std::string verdict;
    double finest_h = 0.0;
    std::optional<double> error;
    std::optional<double> inner_ratio;  ///< from the scenario's own last two spacings
    std::string witness;
    double gradient_ratio = 0.0;
    std::string message;
};

unsigned thread_cap() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MCGRAPH_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) cap = static_cast<unsigned>(v);
    }
    return cap;
}

std::string label_number(double v) {
    std::ostringstream os;
    os << std::setprecision(8) << v;
    return os.str();
}

int cmd_sweep(const Common& c, std::ostream& out, std::ostream& err) {
    std::vector<SweepItem> items;
    std::string base_dir;
    try {
        Config cfg = load_config(c);
        cfg.require_section("sweep");
        cfg.require_known("sweep", {"spacings", "curvature_values"});
        std::vector<double> hs;
        std::vector<double> Hs;
        if (cfg.has("sweep", "spacings")) hs = cfg.numbers("sweep", "spacings");
        if (cfg.has("sweep", "curvature_values")) Hs = cfg.numbers("sweep", "curvature_values");
        if (hs.empty() && Hs.empty())
            throw ConfigError("empty sweep: give [sweep] spacings or curvature_values (line " +
                                  std::to_string(cfg.section_line("sweep")) + ")",
                              "sweep", cfg.section_line("sweep"));
        base_dir = cfg.string("output", "dir", "out");
        std::vector<std::optional<double>> Hopts(Hs.begin(), Hs.end());
        std::vector<std::optional<double>> hopts(hs.begin(), hs.end());
        if (Hopts.empty()) Hopts.push_back(std::nullopt);
        if (hopts.empty()) hopts.push_back(std::nullopt);
        for (const auto& H : Hopts) {
            for (const auto& h : hopts) {
                Config item = cfg;
                std::string label;
                if (H) {
                    item.set("curvature", "kind", "\"constant\"");
                    item.set("curvature", "value", fmt(*H, 17));
                    label = "H_" + label_number(*H);
                }
                if (h) {
                    item.set("grid", "h", fmt(*h, 17));
                    label += (label.empty() ? "" : "_") + std::string("h_") + label_number(*h);
                }
                item.set("output", "dir", '"' + (std::filesystem::path(base_dir) / label).string() + '"');
                items.push_back({label, H, h, load_scenario(item)});
            }
        }
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    std::vector<SweepRow> rows(items.size());
    std::atomic<std::size_t> next{0};
    std::mutex log;
    auto worker = [&] {
        for (std::size_t k = next++; k < items.size(); k = next++) {
            const Scenario& sc = items[k].scenario;
            SweepRow& row = rows[k];
            try {
                const ScenarioResult res = run_scenario(sc);
                write_artifacts(sc, res, sc.output_dir);
                row.exit_code = res.exit_code;
                row.verdict = res.report["verdict"].get<std::string>();
                row.finest_h = res.runs.back().h;
                row.error = res.runs.back().reference_error;
                const std::size_t m = res.runs.size();
                if (m >= 2 && res.runs[m - 1].reference_error && res.runs[m - 2].reference_error)
                    row.inner_ratio = *res.runs[m - 2].reference_error / *res.runs[m - 1].reference_error;
                if (res.witness) {
                    row.witness = res.witness->verdict;
                    row.gradient_ratio = res.witness->gradient_ratio;
                }
            } catch (const Error& e) {
                row.exit_code = kExitSolverFailure;
                row.verdict = "error";
                row.message = e.what();
            }
            if (!c.quiet) {
                std::lock_guard lock(log);
                out << "finished " << items[k].label << ": " << row.verdict << ", exit " << row.exit_code << "\n";
            }
        }
    };
    const unsigned workers = std::min<std::size_t>(thread_cap(), items.size());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    // Ratios between consecutive spacings at equal H; otherwise within a scenario.
    std::vector<std::optional<double>> ratio(items.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (items[k].h) {
            if (k > 0 && items[k - 1].h && items[k - 1].H == items[k].H && rows[k].error && rows[k - 1].error &&
                *rows[k].error > 0.0)
                ratio[k] = *rows[k - 1].error / *rows[k].error;
        } else {
            ratio[k] = rows[k].inner_ratio;
        }
    }

    std::filesystem::create_directories(base_dir);
    {
        std::ofstream csv = open_output((std::filesystem::path(base_dir) / "sweep.csv").string());
        csv << "label,H,h,verdict,exit_code,error,ratio,witness,witness_flag,gradient_ratio\n";
        for (std::size_t k = 0; k < items.size(); ++k) {
            const SweepRow& r = rows[k];
            csv << items[k].label << ',' << (items[k].H ? fmt(*items[k].H, 12) : "") << ',' << fmt(r.finest_h, 12)
                << ',' << r.verdict << ',' << r.exit_code << ',' << (r.error ? fmt(*r.error, 12) : "") << ','
                << (ratio[k] ? fmt(*ratio[k], 12) : "") << ',' << r.witness << ',' << (r.witness == "WITNESS" ? 1 : 0)
                << ',' << (r.witness.empty() ? "" : fmt(r.gradient_ratio, 12)) << '\n';
        }
    }
    out << std::left << std::setw(24) << "scenario" << std::setw(12) << "verdict" << std::setw(6) << "exit"
        << std::setw(14) << "error" << std::setw(10) << "ratio" << "witness\n";
    for (std::size_t k = 0; k < items.size(); ++k) {
        const SweepRow& r = rows[k];
        out << std::left << std::setw(24) << items[k].label << std::setw(12) << r.verdict << std::setw(6) << r.exit_code
            << std::setw(14) << (r.error ? fmt(*r.error, 4) : "-") << std::setw(10) << (ratio[k] ? fmt(*ratio[k], 4) : "-")
            << (r.witness.empty() ? "-" : r.witness) << "\n";
        if (!r.message.empty()) out << "  " << r.message << "\n";
    }
    out << "sweep table in " << (std::filesystem::path(base_dir) / "sweep.csv").string() << "\n";
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Prescribed mean curvature Dirichlet solver and estimate audits", "mcgraph"};
    app.require_subcommand(1);
    Common run_opts, serrin_opts, est_opts, sweep_opts;
    auto* run = app.add_subcommand("run", "solve a scenario and write report.json, traces.csv, fields.csv, heatmap.svg");
    add_common(run, run_opts, true);
    auto* serrin = app.add_subcommand("check-serrin", "check (n-1) kappa >= n |H| on the boundary");
    add_common(serrin, serrin_opts, false);
    std::string shape;
    std::optional<double> H;
    std::optional<int> n;
    serrin->add_option("--domain", shape, "domain shape (disk, ellipse, rounded_rect, dumbbell, levelset)");
    serrin->add_option("--H", H, "constant mean curvature");
    serrin->add_option("--n", n, "dimension n");
    auto* est = app.add_subcommand("estimates", "print the a priori constant ledger without solving");
    add_common(est, est_opts, true);
    auto* sweep = app.add_subcommand("sweep", "run a scenario over [sweep] spacings and/or curvature_values");
    add_common(sweep, sweep_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitConfigError;
    }
    if (*run) return cmd_run(run_opts, out, err);
    if (*serrin) return cmd_check_serrin(serrin_opts, shape, H, n, out, err);
    if (*est) return cmd_estimates(est_opts, out, err);
    return cmd_sweep(sweep_opts, out, err);
}

} // namespace mcgraph
