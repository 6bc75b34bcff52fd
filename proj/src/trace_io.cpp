#include "bregman/trace_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "bregman/errors.hpp"
#include "bregman/serialize.hpp"

namespace bregman {

namespace {

TraceRow to_row(const StepRecord& r) {
    return TraceRow{r.k, r.psi, r.step_norm, r.direction_norm, r.t, r.backtracks, r.accuracy, r.wall_ms};
}

double field_double(const std::string& text, int line) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw IoError("trace csv line " + std::to_string(line) + ": bad number '" + text + "'");
}

int field_int(const std::string& text, int line) {
    const double v = field_double(text, line);
    if (v != static_cast<int>(v))
        throw IoError("trace csv line " + std::to_string(line) + ": expected an integer");
    return static_cast<int>(v);
}

}  // namespace

std::vector<TraceRow> trace_rows(const IterateTrace& trace) {
    std::vector<TraceRow> rows;
    rows.reserve(trace.records.size() + 1);
    TraceRow first = to_row(trace.initial);
    first.t = 0.0;
    first.ms = 0.0;
    rows.push_back(first);
    for (const auto& r : trace.records) rows.push_back(to_row(r));
    return rows;
}

void write_trace_csv(std::ostream& out, const IterateTrace& trace) {
    out << kTraceHeader << '\n';
    for (const auto& r : trace_rows(trace)) {
        out << r.k << ',' << format_double(r.psi) << ',' << format_double(r.step_norm) << ','
            << format_double(r.dir_norm) << ',' << format_double(r.t) << ',' << r.backtracks << ',';
        if (r.accuracy) out << format_double(*r.accuracy);
        out << ',' << format_double(r.ms) << '\n';
    }
}

void write_trace_csv(const std::string& path, const IterateTrace& trace) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_trace_csv(out, trace);
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
        throw IoError("trace csv: unexpected header");
    std::vector<TraceRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 8)
            throw IoError("trace csv line " + std::to_string(lineno) + ": expected 8 fields");
        TraceRow r;
        r.k = field_int(cells[0], lineno);
        r.psi = field_double(cells[1], lineno);
        r.step_norm = field_double(cells[2], lineno);
        r.dir_norm = field_double(cells[3], lineno);
        r.t = field_double(cells[4], lineno);
        r.backtracks = field_int(cells[5], lineno);
        if (!cells[6].empty()) r.accuracy = field_double(cells[6], lineno);
        r.ms = field_double(cells[7], lineno);
        rows.push_back(r);
    }
    return rows;
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_trace_csv(in);
}

}  // namespace bregman
