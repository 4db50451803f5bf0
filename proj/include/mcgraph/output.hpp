#pragma once

#include "mcgraph/grid.hpp"
#include "mcgraph/solver.hpp"

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace mcgraph {

/// Columns i, j, x, y, class, u for every interior and ghost node.
void write_fields_csv(const ScalarField& u, std::ostream& out);

/// Iteration traces; one row per Picard step, prefixed with the spacing.
void write_traces_header(std::ostream& out);
void write_traces_csv(double h, const std::vector<IterationTrace>& traces, std::ostream& out);

/// Heatmap of the interior values with a fixed linear colour scale from the
/// field minimum to its maximum; both are printed in the legend. Large grids
/// are subsampled to at most `max_cells` cells per axis.
void write_heatmap_svg(const ScalarField& u, const std::string& title, std::ostream& out, int max_cells = 160);

/// Opens `path` for writing or throws Error.
std::ofstream open_output(const std::string& path);

} // namespace mcgraph
