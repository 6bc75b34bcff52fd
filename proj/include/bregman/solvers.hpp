#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bregman/directions.hpp"
#include "bregman/objectives.hpp"

namespace bregman {

/// Called with (k, x^k) for k = 0 and every accepted iterate.
using IterateObserver = std::function<void(int, const Vector&)>;

struct SolverConfig {
    std::optional<double> lambda;  // default 1/L for ABPG, RN and BPG
    double alpha = 0.99;           // sufficient-decrease parameter
    double eta = 0.9;              // backtracking factor
    double kappa = 1e-5;           // RN ridge
    int max_iter = 1000;
    double tol = 1e-6;             // on ||x^k - x^{k-1}||
    double t_min = 1e-10;          // line-search floor
    std::uint64_t seed = 0;
    /// RN takes plain fixed steps (t = 1) unless this is set; with it, RN is the
    /// ABPG loop (line search included) on the kernel f + kappa/2 ||.||^2.
    bool rn_line_search = false;
    /// Optional; does not affect the run.
    IterateObserver observer;

    /// Throws SpecError when a field is out of range.
    void validate() const;
};

enum class RunStatus { Converged, MaxIterations, LineSearchFloor, DomainFailure };

std::string to_string(RunStatus status);

struct StepRecord {
    int k = 0;
    double psi = 0.0;
    double step_norm = 0.0;       // ||x^k - x^{k-1}||
    double direction_norm = 0.0;  // ||d^{k-1}||
    double t = 1.0;
    int backtracks = 0;
    std::optional<double> accuracy;  // ||x^k - x*||
    double wall_ms = 0.0;
    // Not serialized; used by invariant checks.
    double model_decrease = 0.0;  // rho of the direction that produced x^k
    double metric_quad = 0.0;     // <hess phi(x^{k-1}) d, d>
    double lambda = 0.0;
};

struct IterateTrace {
    std::string algorithm;
    StepRecord initial;  // k = 0: Psi(x^0) and accuracy only
    std::vector<StepRecord> records;
    Vector final_x;
    RunStatus status = RunStatus::MaxIterations;
    std::vector<std::string> warnings;
    /// Strong convexity modulus of the metric's kernel (1 for the Euclidean baselines).
    double kernel_sigma = 0.0;

    int iterations() const { return static_cast<int>(records.size()); }
    double final_psi() const { return records.empty() ? initial.psi : records.back().psi; }
    std::optional<double> final_accuracy() const {
        return records.empty() ? initial.accuracy : records.back().accuracy;
    }
};

struct LineSearchResult {
    double t = 1.0;
    int backtracks = 0;
    bool floor_hit = false;
    double psi_next = 0.0;
};

/// Backtracking on t = eta^j until Psi(x + t d) <= Psi(x) + alpha t rho.
/// floor_hit is set when t would drop below config.t_min.
LineSearchResult line_search(const CompositeProblem& problem, const Vector& x,
                             const DirectionResult& dir, double psi_x, const SolverConfig& config);

IterateTrace abpg_solve(const CompositeProblem& problem, const SolverConfig& config,
                        const Vector& x0);
IterateTrace pg_solve(const CompositeProblem& problem, const SolverConfig& config,
                      const Vector& x0);
IterateTrace pgl_solve(const CompositeProblem& problem, const SolverConfig& config,
                       const Vector& x0);
IterateTrace rn_solve(const CompositeProblem& problem, const SolverConfig& config,
                      const Vector& x0);
IterateTrace bpg_solve(const CompositeProblem& problem, const SolverConfig& config,
                       const Vector& x0);

/// ||d(x)|| for a fresh ABPG subproblem at x with stepsize lambda.
double stationarity_residual(const CompositeProblem& problem, const Vector& x, double lambda);

enum class Algorithm { ABPG, PG, PGL, RN, BPG };

std::string to_string(Algorithm algorithm);
/// Accepts lower- or upper-case names; throws SpecError otherwise.
Algorithm parse_algorithm(const std::string& name);

IterateTrace solve(Algorithm algorithm, const CompositeProblem& problem,
                   const SolverConfig& config, const Vector& x0);

}  // namespace bregman
