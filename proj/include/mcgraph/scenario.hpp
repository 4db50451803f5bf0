#pragma once

#include "mcgraph/boundary_data.hpp"
#include "mcgraph/catalog.hpp"
#include "mcgraph/config.hpp"
#include "mcgraph/curvature.hpp"
#include "mcgraph/domain.hpp"
#include "mcgraph/estimates.hpp"
#include "mcgraph/solver.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mcgraph {

/// Adversarial bump data request: height eps at the boundary point y0; the
/// support radius comes from the non-existence certificate unless given.
struct BumpSpec {
    double s0 = 0.0;
    Vec2 y0;
    double eps = 0.05;
    std::optional<double> log_radius;
    std::optional<double> radius_from_h;  ///< certify with this constant H instead of the scenario's
};

/// A fully resolved experiment.
struct Scenario {
    Domain domain = Domain::disk(1.0);
    std::string domain_text;
    PrescribedCurvature H;
    std::string boundary_kind = "zero";
    BoundaryData phi;
    std::optional<BumpSpec> bump;
    std::optional<ReferenceSolution> reference;
    std::vector<double> spacings;
    SolveConfig solver;
    std::vector<std::string> audits;
    std::string output_dir = "out";
    bool write_matrix = false;
    std::optional<double> estimate_u_sup;
    std::string config_hash;
};

/// Audit names accepted in [audits] names.
std::vector<std::string> audit_names();

/// Builds a scenario; throws ConfigError naming the key and line on any
/// invalid entry. The bump radius is resolved here (it needs the certificate).
Scenario load_scenario(const Config& cfg);

/// Builds only the domain / curvature from their sections.
Domain load_domain(const Config& cfg, std::string* description = nullptr);
PrescribedCurvature load_curvature(const Config& cfg);

struct ScenarioRun {
    double h = 0.0;
    SolveResult solve;
    std::optional<double> reference_error;
};

struct ScenarioResult {
    std::vector<ScenarioRun> runs;
    std::vector<EstimateAudit> audits;     ///< every audit of every run plus the requested extras
    std::vector<std::string> notes;        ///< refusals and not-applicable checks
    std::optional<WitnessResult> witness;
    nlohmann::ordered_json report;
    int exit_code = 0;
};

enum ExitCode { kExitOk = 0, kExitViolated = 1, kExitSolverFailure = 2, kExitAuditFailure = 3, kExitConfigError = 4 };

/// Solves the scenario at every spacing, runs the audits and assembles the
/// report. Exit code: 0, 2 (some run did not converge), 3 (audit failure or
/// non-existence witness).
ScenarioResult run_scenario(const Scenario& scenario);

/// Writes report.json, traces.csv, fields.csv and heatmap.svg (finest run).
void write_artifacts(const Scenario& scenario, const ScenarioResult& result, const std::string& dir);

/// Constant ledger (height, boundary gradient, global gradient, non-existence)
/// without solving; `u_sup` defaults to the height bound.
nlohmann::ordered_json estimates_ledger(const Scenario& scenario, std::vector<std::string>* refusals = nullptr);

} // namespace mcgraph
