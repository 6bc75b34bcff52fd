#pragma once

// Experiment orchestration: replications over an (m, n) grid, per-run trace
// CSVs, and the aggregate mean table.
//
// Output layout under RunManifest::out_dir:
//   traces/<family>_m<m>_n<n>_r<rep>_<ALGO>.csv
//   runs.csv        one row per (m, n, rep, algorithm)
//   aggregate.csv   m,n,algorithm,runs,iteration,obj,acc,best
//   manifest.txt    key=value, keys identical to the CLI flags

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bregman/instance.hpp"
#include "bregman/solvers.hpp"

namespace bregman {

struct RunManifest {
    InstanceSpec instance;       // n and m are replaced by the grid when given
    std::vector<int> n_values;   // empty: {instance.n}
    std::vector<int> m_values;   // empty: {instance.m}
    std::vector<Algorithm> algorithms;
    SolverConfig config;
    std::string out_dir;
    int reps = 1;
    std::vector<std::string> notes;  // echoed into manifest.txt as comments

    /// Throws SpecError (reps < 1, no algorithms, BPG outside NonnegKL, ...).
    void validate() const;
    std::vector<int> ns() const;
    std::vector<int> ms() const;
};

/// Seed of replication `rep`: mix64(base + (rep + 1) * 0x9E3779B97F4A7C15).
std::uint64_t derive_seed(std::uint64_t base, int rep);

/// Worker count: BREGMAN_KIT_THREADS when set (>= 1), else hardware concurrency.
int worker_count();

struct RunResult {
    int m = 0, n = 0, rep = 0;
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::ABPG;
    RunStatus status = RunStatus::MaxIterations;
    int iterations = 0;
    double final_psi = 0.0;
    std::optional<double> final_accuracy;
    std::string trace_file;  // relative to out_dir
    double wall_ms = 0.0;
};

/// Objective means above this (or non-finite) print as "---".
inline constexpr double kAggregateSentinel = 1e8;

struct AggregateRow {
    int m = 0, n = 0;
    Algorithm algorithm = Algorithm::ABPG;
    int runs = 0;
    double iteration = 0.0;
    double obj = 0.0;
    std::optional<double> acc;
    /// '|'-joined subset of {iteration, obj, acc} where this row is best in its
    /// (m, n) group; ties are all marked.
    std::string best;
};

/// Pure reduction of per-run finals; rows ordered by (m, n, manifest order).
std::vector<AggregateRow> aggregate(const std::vector<RunResult>& runs,
                                    const std::vector<Algorithm>& order);

std::string runs_csv(const std::vector<RunResult>& runs);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string manifest_text(const RunManifest& manifest);

struct BenchReport {
    std::vector<RunResult> runs;
    std::vector<AggregateRow> rows;
};

/// Runs every (m, n, rep, algorithm) combination and writes the layout above.
/// Solver failures are recorded as statuses; I/O failures throw IoError after
/// the completed runs have been flushed to runs.csv.
BenchReport run_benchmark(const RunManifest& manifest);

std::string trace_file_name(Family family, int m, int n, int rep, Algorithm algorithm);

}  // namespace bregman
