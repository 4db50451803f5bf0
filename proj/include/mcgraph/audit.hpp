#pragma once

#include <string>

namespace mcgraph {

/// Outcome of checking one a priori estimate against a measured quantity.
/// pass <=> measured <= bound + tolerance.
struct EstimateAudit {
    std::string name;
    double bound = 0.0;
    double measured = 0.0;
    double margin = 0.0;  ///< bound - measured
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

inline EstimateAudit make_audit(std::string name, double bound, double measured, double tolerance = 0.0,
                                std::string note = {}) {
    EstimateAudit a;
    a.name = std::move(name);
    a.bound = bound;
    a.measured = measured;
    a.margin = bound - measured;
    a.tolerance = tolerance;
    a.pass = measured <= bound + tolerance;
    a.note = std::move(note);
    return a;
}

} // namespace mcgraph
