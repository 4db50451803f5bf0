#include "mcgraph/output.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <limits>

namespace mcgraph {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << std::setprecision(12);
    return out;
}

void write_fields_csv(const ScalarField& u, std::ostream& out) {
    const Grid& g = u.grid();
    out << "i,j,x,y,class,u\n";
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const int id = g.node_id(i, j);
            const NodeClass c = g.classification(id);
            if (c == NodeClass::exterior) continue;
            const Vec2 p = g.position(id);
            out << i << ',' << j << ',' << p.x << ',' << p.y << ',' << to_string(c) << ',' << u.node(id) << '\n';
        }
    }
}

void write_traces_header(std::ostream& out) {
    out << "h,stage,tau,iteration,u_sup,grad_sup,residual,update,damping\n";
}

void write_traces_csv(double h, const std::vector<IterationTrace>& traces, std::ostream& out) {
    for (const IterationTrace& t : traces)
        out << h << ',' << t.stage << ',' << t.tau << ',' << t.iteration << ',' << t.u_sup << ',' << t.grad_sup << ','
            << t.residual << ',' << t.update << ',' << t.damping << '\n';
}

namespace {

// Viridis anchors, linearly interpolated.
std::string colour(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                                {59, 82, 139},
                                                                {33, 145, 140},
                                                                {94, 201, 98},
                                                                {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(k);
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

} // namespace

void write_heatmap_svg(const ScalarField& u, const std::string& title, std::ostream& out, int max_cells) {
    const Grid& g = u.grid();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int id : g.interior_nodes()) {
        lo = std::min(lo, u.node(id));
        hi = std::max(hi, u.node(id));
    }
    if (!(lo <= hi)) lo = hi = 0.0;
    const double span = hi > lo ? hi - lo : 1.0;
    const int stride = std::max(1, (std::max(g.nx(), g.ny()) + max_cells - 1) / max_cells);
    const int cols = (g.nx() + stride - 1) / stride;
    const int rows = (g.ny() + stride - 1) / stride;
    const double cell = 480.0 / std::max(cols, rows);
    const double width = cols * cell + 140.0;
    const double height = rows * cell + 60.0;

    out << std::setprecision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    out << "<g transform=\"translate(10,40)\" shape-rendering=\"crispEdges\">\n";
    for (int bj = 0; bj < rows; ++bj) {
        for (int bi = 0; bi < cols; ++bi) {
            // Average of the interior nodes in the block.
            double sum = 0.0;
            int count = 0;
            for (int j = bj * stride; j < std::min(g.ny(), (bj + 1) * stride); ++j)
                for (int i = bi * stride; i < std::min(g.nx(), (bi + 1) * stride); ++i) {
                    const int id = g.node_id(i, j);
                    if (g.classification(id) != NodeClass::interior) continue;
                    sum += u.node(id);
                    ++count;
                }
            if (count == 0) continue;
            out << "<rect x=\"" << bi * cell << "\" y=\"" << (rows - 1 - bj) * cell << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"" << colour((sum / count - lo) / span) << "\"/>\n";
        }
    }
    out << "</g>\n";
    const double lx = cols * cell + 30.0;
    const double ly = 40.0;
    const double lh = rows * cell;
    out << "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
    for (int k = 0; k <= 4; ++k)
        out << "<stop offset=\"" << k / 4.0 << "\" stop-color=\"" << colour(k / 4.0) << "\"/>\n";
    out << "</linearGradient></defs>\n";
    out << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"20\" height=\"" << lh
        << "\" fill=\"url(#scale)\" stroke=\"black\"/>\n";
    out << std::setprecision(8);
    out << "<text x=\"" << lx + 26 << "\" y=\"" << ly + 10 << "\" font-family=\"sans-serif\" font-size=\"12\">max "
        << hi << "</text>\n";
    out << "<text x=\"" << lx + 26 << "\" y=\"" << ly + lh << "\" font-family=\"sans-serif\" font-size=\"12\">min "
        << lo << "</text>\n";
    out << "</svg>\n";
}

} // namespace mcgraph
