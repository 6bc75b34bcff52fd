#include "bregman/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bregman/errors.hpp"
#include "bregman/trace_io.hpp"

namespace bregman {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 80, kRight = 640, kTop = 40, kBottom = 440;

// Matplotlib's default cycle, so ABPG/PG/PGL/RN come out blue/orange/green/red.
const char* const kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string to_string(PlotKind kind) {
    return kind == PlotKind::Objective ? "objective" : "accuracy";
}

PlotKind parse_plot_kind(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "objective" || lower == "obj" || lower == "psi") return PlotKind::Objective;
    if (lower == "accuracy" || lower == "acc") return PlotKind::Accuracy;
    throw SpecError("unknown plot kind '" + name + "'");
}

std::string render_svg(const std::vector<PlotSeries>& input, PlotKind kind) {
    std::vector<PlotSeries> series;
    for (const auto& s : input) {
        PlotSeries kept{s.label, {}};
        for (const auto& [k, y] : s.points)
            if (std::isfinite(y) && y > 0.0) kept.points.emplace_back(k, y);
        if (!kept.points.empty()) series.push_back(std::move(kept));
    }
    if (series.empty()) throw EmptyTrace("no plottable " + to_string(kind) + " values");

    double lo = INFINITY, hi = -INFINITY;
    int kmax = 1;
    for (const auto& s : series) {
        for (const auto& [k, y] : s.points) {
            lo = std::min(lo, std::log10(y));
            hi = std::max(hi, std::log10(y));
            kmax = std::max(kmax, k);
        }
    }
    double ymin = std::floor(lo), ymax = std::ceil(hi);
    if (ymax <= ymin) ymax = ymin + 1.0;

    auto px = [&](double k) { return kLeft + (kRight - kLeft) * k / kmax; };
    auto py = [&](double ly) { return kBottom - (kBottom - kTop) * (ly - ymin) / (ymax - ymin); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\""
      << " data-kind=\"" << to_string(kind) << "\" data-ymin=\"" << ymin << "\" data-ymax=\""
      << ymax << "\" data-top=\"" << kTop << "\" data-bottom=\"" << kBottom << "\" data-xmax=\""
      << kmax << "\" data-left=\"" << kLeft << "\" data-right=\"" << kRight << "\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kRight - kLeft
      << "\" height=\"" << kBottom - kTop << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Decade ticks; thin them out so at most ~10 labels show.
    const int decades = static_cast<int>(ymax - ymin);
    const int stride = std::max(1, decades / 10 + (decades % 10 ? 1 : 0));
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); e += stride) {
        const double y = py(e);
        o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << kRight
          << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
        o << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(y + 4)
          << "\" font-size=\"12\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const int k = static_cast<int>(std::lround(kmax * i / 4.0));
        o << "<text x=\"" << fmt(px(k)) << "\" y=\"" << kBottom + 18
          << "\" font-size=\"12\" text-anchor=\"middle\">" << k << "</text>\n";
    }
    o << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 40
      << "\" font-size=\"14\" text-anchor=\"middle\">iteration k</text>\n";
    o << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2 << "\" font-size=\"14\" "
      << "text-anchor=\"middle\" transform=\"rotate(-90 20 " << (kTop + kBottom) / 2 << ")\">"
      << (kind == PlotKind::Objective ? "objective value" : "accuracy ||x - x*||")
      << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % std::size(kColors)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-label=\""
          << escape(series[i].label) << "\" points=\"";
        for (std::size_t j = 0; j < series[i].points.size(); ++j) {
            const auto& [k, y] = series[i].points[j];
            if (j) o << ' ';
            o << fmt(px(k)) << ',' << fmt(py(std::log10(y)));
        }
        o << "\"/>\n";
        const double ly = kTop + 20 + 20 * static_cast<double>(i);
        o << "<line x1=\"" << kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kRight + 45
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << kRight + 52 << "\" y=\"" << ly + 4 << "\" font-size=\"13\">"
          << escape(series[i].label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string series_label(const std::string& path) {
    const std::string stem = std::filesystem::path(path).stem().string();
    const auto pos = stem.rfind('_');
    return pos == std::string::npos ? stem : stem.substr(pos + 1);
}

void emit_plot(const std::vector<std::string>& trace_files, PlotKind kind,
               const std::string& out_path) {
    if (trace_files.empty()) throw EmptyTrace("no trace files given");
    std::vector<PlotSeries> series;
    for (const auto& file : trace_files) {
        PlotSeries s{series_label(file), {}};
        for (const auto& row : read_trace_csv(file)) {
            if (kind == PlotKind::Objective) {
                s.points.emplace_back(row.k, row.psi);
            } else if (row.accuracy) {
                s.points.emplace_back(row.k, *row.accuracy);
            }
        }
        series.push_back(std::move(s));
    }
    const std::string svg = render_svg(series, kind);
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open '" + out_path + "' for writing");
    out << svg;
}

}  // namespace bregman
