#pragma once

// Trace CSV: header `k,psi,step_norm,dir_norm,t,backtracks,accuracy,ms`, one row
// per iterate starting with k = 0, doubles printed with 17 significant digits,
// empty accuracy when the instance carries no ground truth. `ms` is wall time
// and the only non-reproducible column.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bregman/solvers.hpp"

namespace bregman {

inline constexpr const char* kTraceHeader = "k,psi,step_norm,dir_norm,t,backtracks,accuracy,ms";

struct TraceRow {
    int k = 0;
    double psi = 0.0;
    double step_norm = 0.0;
    double dir_norm = 0.0;
    double t = 0.0;
    int backtracks = 0;
    std::optional<double> accuracy;
    double ms = 0.0;
};

std::vector<TraceRow> trace_rows(const IterateTrace& trace);

void write_trace_csv(std::ostream& out, const IterateTrace& trace);
void write_trace_csv(const std::string& path, const IterateTrace& trace);

/// Throws IoError on a bad header or malformed row.
std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> read_trace_csv(const std::string& path);

}  // namespace bregman
