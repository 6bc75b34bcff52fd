#pragma once

// SVG 1.1 line charts of trace columns against k with a log10 y-axis.
//
// Parse-back contract: the root <svg> carries data-ymin / data-ymax (log10 of
// the axis range), data-top / data-bottom (pixel rows of those bounds),
// data-xmax, data-left and data-right; each series is one <polyline> with a
// data-label attribute.

#include <string>
#include <utility>
#include <vector>

namespace bregman {

enum class PlotKind { Objective, Accuracy };

std::string to_string(PlotKind kind);
/// "objective" / "obj" / "psi" or "accuracy" / "acc"; throws SpecError.
PlotKind parse_plot_kind(const std::string& name);

struct PlotSeries {
    std::string label;
    std::vector<std::pair<int, double>> points;  // (k, value)
};

/// Points with non-positive or non-finite values cannot sit on a log axis and
/// are dropped. Throws EmptyTrace when nothing plottable remains.
std::string render_svg(const std::vector<PlotSeries>& series, PlotKind kind);

/// Reads trace CSVs, labels each series by the last '_'-separated token of the
/// file stem (".../lpls_m800_n500_r0_ABPG.csv" -> "ABPG") and writes the SVG.
/// Throws EmptyTrace when the requested column is missing everywhere.
void emit_plot(const std::vector<std::string>& trace_files, PlotKind kind,
               const std::string& out_path);

/// Label rule used by emit_plot.
std::string series_label(const std::string& path);

}  // namespace bregman
