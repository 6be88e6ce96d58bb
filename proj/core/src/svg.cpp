#include "fahs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "fahs/csv.hpp"
#include "fahs/errors.hpp"

namespace fahs {

namespace {

const char* procedure_color(const std::string& name) {
    static const std::map<std::string, const char*> palette = {
        {"bh", "#4477aa"},    {"qvalue", "#66ccee"}, {"locfdr", "#228833"},
        {"ebhs", "#ccbb44"},  {"fbhs", "#ee6677"},   {"mfahs", "#aa3377"},
        {"efahs", "#bbbbbb"}, {"oracle", "#000000"}};
    const auto it = palette.find(name);
    return it == palette.end() ? "#888888" : it->second;
}

struct Panel {
    double gamma = 0.0;
    std::vector<const AggregateCell*> cells;
};

}  // namespace

std::string render_fdp_boxplots(const AggregateSummary& summary) {
    // Group cells into one panel per gamma, preserving order.
    std::vector<Panel> panels;
    for (const auto& cell : summary.cells) {
        auto it = std::find_if(panels.begin(), panels.end(),
                               [&](const Panel& p) { return p.gamma == cell.gamma; });
        if (it == panels.end()) {
            panels.push_back({cell.gamma, {}});
            it = panels.end() - 1;
        }
        it->cells.push_back(&cell);
    }

    constexpr double slot_w = 34.0;
    constexpr double box_w = 20.0;
    constexpr double panel_h = 240.0;
    constexpr double margin_l = 56.0;
    constexpr double margin_r = 16.0;
    constexpr double margin_top = 36.0;
    constexpr double panel_gap = 58.0;
    constexpr double plot_h = 180.0;

    std::size_t max_cells = 1;
    double y_max = 0.0;
    for (const auto& p : panels) {
        max_cells = std::max(max_cells, p.cells.size());
        for (const auto* c : p.cells) {
            y_max = std::max({y_max, c->fdp_box.max, c->gamma});
        }
    }
    y_max = std::max(0.2, y_max * 1.1);

    const double width = margin_l + slot_w * static_cast<double>(max_cells) + margin_r;
    const double height =
        margin_top + static_cast<double>(panels.size()) * (panel_h + panel_gap);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    double panel_top = margin_top;
    for (const auto& panel : panels) {
        const double base_y = panel_top + plot_h;
        auto y_of = [&](double v) { return base_y - v / y_max * plot_h; };

        svg << "<text x=\"" << margin_l << "\" y=\"" << panel_top - 10
            << "\" font-size=\"12\">FDP distribution, nominal level "
            << format_double(panel.gamma) << "</text>\n";

        // Axes and y ticks.
        svg << "<line x1=\"" << margin_l - 6 << "\" y1=\"" << base_y << "\" x2=\""
            << margin_l + slot_w * static_cast<double>(panel.cells.size()) << "\" y2=\""
            << base_y << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << margin_l - 6 << "\" y1=\"" << base_y << "\" x2=\""
            << margin_l - 6 << "\" y2=\"" << y_of(y_max) << "\" stroke=\"black\"/>\n";
        for (int tick = 0; tick <= 4; ++tick) {
            const double v = y_max * tick / 4.0;
            svg << "<line x1=\"" << margin_l - 10 << "\" y1=\"" << y_of(v) << "\" x2=\""
                << margin_l - 6 << "\" y2=\"" << y_of(v) << "\" stroke=\"black\"/>\n";
            svg << "<text x=\"" << margin_l - 13 << "\" y=\"" << y_of(v) + 3
                << "\" text-anchor=\"end\">" << format_double(std::round(v * 100.0) / 100.0)
                << "</text>\n";
        }

        // Nominal level.
        svg << "<line x1=\"" << margin_l - 6 << "\" y1=\"" << y_of(panel.gamma) << "\" x2=\""
            << margin_l + slot_w * static_cast<double>(panel.cells.size()) << "\" y2=\""
            << y_of(panel.gamma)
            << "\" stroke=\"black\" stroke-dasharray=\"6,4\" stroke-width=\"1\"/>\n";

        for (std::size_t i = 0; i < panel.cells.size(); ++i) {
            const AggregateCell& c = *panel.cells[i];
            const double cx = margin_l + slot_w * (static_cast<double>(i) + 0.5);
            const char* color = procedure_color(c.procedure);
            const BoxStats& b = c.fdp_box;

            // Whiskers, box, median.
            svg << "<line x1=\"" << cx << "\" y1=\"" << y_of(b.lo_whisker) << "\" x2=\"" << cx
                << "\" y2=\"" << y_of(b.q1) << "\" stroke=\"" << color << "\"/>\n";
            svg << "<line x1=\"" << cx << "\" y1=\"" << y_of(b.q3) << "\" x2=\"" << cx
                << "\" y2=\"" << y_of(b.hi_whisker) << "\" stroke=\"" << color << "\"/>\n";
            svg << "<rect x=\"" << cx - box_w / 2 << "\" y=\"" << y_of(b.q3) << "\" width=\""
                << box_w << "\" height=\"" << std::max(0.5, y_of(b.q1) - y_of(b.q3))
                << "\" fill=\"" << color << "\" fill-opacity=\"0.35\" stroke=\"" << color
                << "\"/>\n";
            svg << "<line x1=\"" << cx - box_w / 2 << "\" y1=\"" << y_of(b.median)
                << "\" x2=\"" << cx + box_w / 2 << "\" y2=\"" << y_of(b.median)
                << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
            for (double o : b.outliers) {
                svg << "<circle cx=\"" << cx << "\" cy=\"" << y_of(o)
                    << "\" r=\"1.8\" fill=\"none\" stroke=\"" << color << "\"/>\n";
            }

            // Empirical FDR cross.
            const double fy = y_of(c.fdr);
            svg << "<path d=\"M " << cx - 4 << ' ' << fy - 4 << " L " << cx + 4 << ' '
                << fy + 4 << " M " << cx - 4 << ' ' << fy + 4 << " L " << cx + 4 << ' '
                << fy - 4 << "\" stroke=\"black\" stroke-width=\"1.4\"/>\n";

            // Cell label: procedure over s.
            svg << "<text x=\"" << cx << "\" y=\"" << base_y + 12
                << "\" text-anchor=\"middle\">" << c.procedure << "</text>\n";
            svg << "<text x=\"" << cx << "\" y=\"" << base_y + 24
                << "\" text-anchor=\"middle\">s=" << format_double(c.s) << "</text>\n";
        }
        panel_top += panel_h + panel_gap;
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_fdp_boxplots(const std::string& path, const AggregateSummary& summary) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << render_fdp_boxplots(summary);
}

}  // namespace fahs
