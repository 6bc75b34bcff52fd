#include "bregman/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>

#include "bregman/errors.hpp"

namespace bregman {

namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
public:
    Recorder(const CompositeProblem& problem, const SolverConfig& config, IterateTrace& trace)
        : problem_(problem), observer_(config.observer), trace_(trace), start_(Clock::now()) {}

    void initial(const Vector& x0, double psi) {
        trace_.initial.k = 0;
        trace_.initial.psi = psi;
        trace_.initial.step_norm = 0.0;
        trace_.initial.direction_norm = 0.0;
        trace_.initial.t = 0.0;
        trace_.initial.accuracy = accuracy(x0);
        if (observer_) observer_(0, x0);
    }

    StepRecord& step(const Vector& x, double psi, double step_norm, double direction_norm,
                     double t, int backtracks) {
        StepRecord r;
        r.k = static_cast<int>(trace_.records.size()) + 1;
        r.psi = psi;
        r.step_norm = step_norm;
        r.direction_norm = direction_norm;
        r.t = t;
        r.backtracks = backtracks;
        r.accuracy = accuracy(x);
        r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
        trace_.records.push_back(r);
        if (observer_) observer_(r.k, x);
        return trace_.records.back();
    }

private:
    std::optional<double> accuracy(const Vector& x) const {
        if (!problem_.ground_truth) return std::nullopt;
        return (x - *problem_.ground_truth).norm();
    }

    const CompositeProblem& problem_;
    const IterateObserver& observer_;
    IterateTrace& trace_;
    Clock::time_point start_;
};

bool start_run(const CompositeProblem& problem, const SolverConfig& config, const Vector& x0,
               IterateTrace& trace, Recorder& rec, double& psi) {
    config.validate();
    if (x0.size() != problem.dim()) throw DomainError("solver: x0 dimension mismatch");
    trace.final_x = x0;
    psi = problem.psi(x0);
    rec.initial(x0, psi);
    if (!std::isfinite(psi)) {
        trace.status = RunStatus::DomainFailure;
        trace.warnings.push_back("initial point outside dom Psi");
        return false;
    }
    return true;
}

// With use_line_search = false every step is taken with t = 1 (plain fixed-step
// updates); Psi may then increase and a step leaving dom Psi ends the run.
IterateTrace descent_loop(const CompositeProblem& problem, const SolverConfig& config,
                          double lambda, const Vector& x0, std::string name,
                          bool use_line_search = true) {
    IterateTrace trace;
    trace.algorithm = std::move(name);
    trace.kernel_sigma = problem.kernel.strong_convexity();
    Recorder rec(problem, config, trace);
    double psi = 0.0;
    if (!start_run(problem, config, x0, trace, rec, psi)) return trace;
    if (!problem.kernel.in_interior(x0)) {
        trace.status = RunStatus::DomainFailure;
        trace.warnings.push_back("initial point not interior to dom phi");
        return trace;
    }

    Vector x = x0;
    trace.status = RunStatus::MaxIterations;
    for (int k = 1; k <= config.max_iter; ++k) {
        DirectionResult dir;
        try {
            const Vector v = problem.f->gradient(x);
            dir = solve_subproblem(problem.g, problem.kernel.metric(x), lambda, v, x);
        } catch (const Error& e) {
            trace.status = RunStatus::DomainFailure;
            trace.warnings.push_back(std::string("iteration ") + std::to_string(k) + ": " + e.what());
            break;
        }
        LineSearchResult ls;
        if (use_line_search) {
            ls = line_search(problem, x, dir, psi, config);
        } else {
            ls.psi_next = problem.psi(x + dir.d);
            if (!std::isfinite(ls.psi_next)) {
                trace.status = RunStatus::DomainFailure;
                trace.warnings.push_back("iteration " + std::to_string(k) + ": iterate left dom Psi");
                break;
            }
        }
        if (ls.floor_hit) {
            trace.status = RunStatus::LineSearchFloor;
            break;
        }
        const double dnorm = dir.d.norm();
        x += ls.t * dir.d;
        psi = ls.psi_next;
        StepRecord& r = rec.step(x, psi, ls.t * dnorm, dnorm, ls.t, ls.backtracks);
        r.model_decrease = dir.rho;
        r.metric_quad = dir.metric_quad;
        r.lambda = lambda;
        if (r.step_norm <= config.tol) {
            trace.status = RunStatus::Converged;
            break;
        }
    }
    trace.final_x = x;
    return trace;
}

// Proximal step of the Euclidean baselines. On the nonnegative orthant the
// projection may land on the boundary, which is fine for f but not for a kernel.
DirectionResult euclidean_direction(const Regularizer& g, double lambda, const Vector& v,
                                    const Vector& x) {
    if (g.kind() == RegularizerKind::L1PlusNonneg)
        return solve_nonneg_l1_projected(lambda, v, x, g.theta1());
    return solve_subproblem(g, DiagonalMetric{Vector::Ones(x.size())}, lambda, v, x);
}

}  // namespace

void SolverConfig::validate() const {
    if (lambda && !(*lambda > 0.0)) throw SpecError("lambda must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw SpecError("alpha must lie in (0, 1)");
    if (!(eta > 0.0 && eta < 1.0)) throw SpecError("eta must lie in (0, 1)");
    if (!(kappa > 0.0)) throw SpecError("kappa must be positive");
    if (max_iter < 0) throw SpecError("max_iter must be nonnegative");
    if (!(tol >= 0.0)) throw SpecError("tol must be nonnegative");
    if (!(t_min > 0.0 && t_min < 1.0)) throw SpecError("t_min must lie in (0, 1)");
}

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Converged: return "Converged";
        case RunStatus::MaxIterations: return "MaxIterations";
        case RunStatus::LineSearchFloor: return "LineSearchFloor";
        case RunStatus::DomainFailure: return "DomainFailure";
    }
    return "Unknown";
}

LineSearchResult line_search(const CompositeProblem& problem, const Vector& x,
                             const DirectionResult& dir, double psi_x, const SolverConfig& config) {
    LineSearchResult out;
    double t = 1.0;
    for (;;) {
        const double psi_t = problem.psi(x + t * dir.d);
        if (psi_t <= psi_x + config.alpha * t * dir.rho) {
            out.t = t;
            out.psi_next = psi_t;
            return out;
        }
        t *= config.eta;
        ++out.backtracks;
        if (t < config.t_min) {
            out.t = t;
            out.floor_hit = true;
            out.psi_next = psi_x;
            return out;
        }
    }
}

IterateTrace abpg_solve(const CompositeProblem& problem, const SolverConfig& config,
                        const Vector& x0) {
    const double lambda = config.lambda ? *config.lambda : 1.0 / lsmad_constant(*problem.f, problem.kernel);
    return descent_loop(problem, config, lambda, x0, "ABPG");
}

IterateTrace rn_solve(const CompositeProblem& problem, const SolverConfig& config,
                      const Vector& x0) {
    CompositeProblem newton(problem.f, problem.g, Kernel::f_plus_ridge(problem.f, config.kappa),
                            problem.ground_truth);
    const double lambda = config.lambda ? *config.lambda : 1.0 / lsmad_constant(*newton.f, newton.kernel);
    return descent_loop(newton, config, lambda, x0, "RN", config.rn_line_search);
}

IterateTrace pg_solve(const CompositeProblem& problem, const SolverConfig& config,
                      const Vector& x0) {
    IterateTrace trace;
    trace.algorithm = "PG";
    trace.kernel_sigma = 1.0;
    Recorder rec(problem, config, trace);
    double psi = 0.0;
    if (!start_run(problem, config, x0, trace, rec, psi)) return trace;

    const double lambda = 1.0 / euclidean_step_constant(*problem.f);
    Vector x = x0;
    trace.status = RunStatus::MaxIterations;
    for (int k = 1; k <= config.max_iter; ++k) {
        DirectionResult dir;
        try {
            dir = euclidean_direction(problem.g, lambda, problem.f->gradient(x), x);
        } catch (const Error& e) {
            trace.status = RunStatus::DomainFailure;
            trace.warnings.push_back(std::string("iteration ") + std::to_string(k) + ": " + e.what());
            break;
        }
        x += dir.d;
        psi = problem.psi(x);
        const double dnorm = dir.d.norm();
        StepRecord& r = rec.step(x, psi, dnorm, dnorm, 1.0, 0);
        r.model_decrease = dir.rho;
        r.metric_quad = dir.metric_quad;
        r.lambda = lambda;
        if (!std::isfinite(psi)) {
            trace.status = RunStatus::DomainFailure;
            trace.warnings.push_back("iterate left dom Psi");
            break;
        }
        if (dnorm <= config.tol) {
            trace.status = RunStatus::Converged;
            break;
        }
    }
    trace.final_x = x;
    return trace;
}

IterateTrace pgl_solve(const CompositeProblem& problem, const SolverConfig& config,
                       const Vector& x0) {
    constexpr double kGrowth = 2.0;
    constexpr double kMaxLipschitz = 1e30;

    IterateTrace trace;
    trace.algorithm = "PGL";
    trace.kernel_sigma = 1.0;
    Recorder rec(problem, config, trace);
    double psi = 0.0;
    if (!start_run(problem, config, x0, trace, rec, psi)) return trace;

    const double L0 = euclidean_step_constant(*problem.f);
    double L = L0;
    Vector x = x0;
    trace.status = RunStatus::MaxIterations;
    for (int k = 1; k <= config.max_iter; ++k) {
        DirectionResult dir;
        int backtracks = 0;
        bool floor_hit = false;
        try {
            const double fx = problem.f->value(x);
            const Vector v = problem.f->gradient(x);
            for (;;) {
                dir = euclidean_direction(problem.g, 1.0 / L, v, x);
                const Vector trial = x + dir.d;
                double ftrial = std::numeric_limits<double>::infinity();
                try {
                    ftrial = problem.f->value(trial);
                } catch (const DomainError&) {
                }
                if (ftrial <= fx + v.dot(dir.d) + 0.5 * L * dir.d.squaredNorm()) break;
                L *= kGrowth;
                ++backtracks;
                if (L > kMaxLipschitz) {
                    floor_hit = true;
                    break;
                }
            }
        } catch (const Error& e) {
            trace.status = RunStatus::DomainFailure;
            trace.warnings.push_back(std::string("iteration ") + std::to_string(k) + ": " + e.what());
            break;
        }
        if (floor_hit) {
            trace.status = RunStatus::LineSearchFloor;
            break;
        }
        x += dir.d;
        psi = problem.psi(x);
        const double dnorm = dir.d.norm();
        // t reports the stepsize relative to the initial 1/L0.
        StepRecord& r = rec.step(x, psi, dnorm, dnorm, L0 / L, backtracks);
        r.model_decrease = dir.rho;
        r.metric_quad = dir.metric_quad;
        r.lambda = 1.0 / L;
        if (!std::isfinite(psi)) {
            trace.status = RunStatus::DomainFailure;
            trace.warnings.push_back("iterate left dom Psi");
            break;
        }
        if (dnorm <= config.tol) {
            trace.status = RunStatus::Converged;
            break;
        }
    }
    trace.final_x = x;
    return trace;
}

IterateTrace bpg_solve(const CompositeProblem& problem, const SolverConfig& config,
                       const Vector& x0) {
    if (problem.f->kind() != ObjectiveKind::KLLinear)
        throw UnsupportedPair("bpg_solve: closed-form step needs the KL objective");
    if (problem.g.kind() == RegularizerKind::AffineEquality)
        throw UnsupportedPair("bpg_solve: equality constraints are not supported");
    const double theta1 = problem.g.kind() == RegularizerKind::Zero ? 0.0 : problem.g.theta1();
    const Kernel entropy = Kernel::shannon_entropy();
    const double lambda = config.lambda ? *config.lambda : 1.0 / lsmad_constant(*problem.f, entropy);

    IterateTrace trace;
    trace.algorithm = "BPG";
    trace.kernel_sigma = 0.0;
    Recorder rec(problem, config, trace);
    double psi = 0.0;
    if (!start_run(problem, config, x0, trace, rec, psi)) return trace;
    if (!(x0.array() > 0.0).all()) {
        trace.status = RunStatus::DomainFailure;
        trace.warnings.push_back("initial point not strictly positive");
        return trace;
    }

    Vector x = x0;
    trace.status = RunStatus::MaxIterations;
    for (int k = 1; k <= config.max_iter; ++k) {
        EntropyStep step;
        try {
            step = bpg_entropy_step(lambda, problem.f->gradient(x), x, theta1);
        } catch (const Error& e) {
            trace.status = RunStatus::DomainFailure;
            trace.warnings.push_back(std::string("iteration ") + std::to_string(k) + ": " + e.what());
            break;
        }
        if (step.clamped)
            trace.warnings.push_back("iteration " + std::to_string(k) + ": exp argument clamped");
        const Vector d = step.x_next - x;
        x = step.x_next;
        psi = problem.psi(x);
        const double dnorm = d.norm();
        StepRecord& r = rec.step(x, psi, dnorm, dnorm, 1.0, 0);
        r.lambda = lambda;
        if (!std::isfinite(psi) || !(x.array() > 0.0).all() || !x.allFinite()) {
            trace.status = RunStatus::DomainFailure;
            trace.warnings.push_back("iterate degenerated after exp clamp");
            break;
        }
        if (dnorm <= config.tol) {
            trace.status = RunStatus::Converged;
            break;
        }
    }
    trace.final_x = x;
    return trace;
}

double stationarity_residual(const CompositeProblem& problem, const Vector& x, double lambda) {
    const Vector v = problem.f->gradient(x);
    return solve_subproblem(problem.g, problem.kernel.metric(x), lambda, v, x).d.norm();
}

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::ABPG: return "ABPG";
        case Algorithm::PG: return "PG";
        case Algorithm::PGL: return "PGL";
        case Algorithm::RN: return "RN";
        case Algorithm::BPG: return "BPG";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (Algorithm a : {Algorithm::ABPG, Algorithm::PG, Algorithm::PGL, Algorithm::RN, Algorithm::BPG})
        if (to_string(a) == upper) return a;
    throw SpecError("unknown algorithm '" + name + "'");
}

IterateTrace solve(Algorithm algorithm, const CompositeProblem& problem,
                   const SolverConfig& config, const Vector& x0) {
    switch (algorithm) {
        case Algorithm::ABPG: return abpg_solve(problem, config, x0);
        case Algorithm::PG: return pg_solve(problem, config, x0);
        case Algorithm::PGL: return pgl_solve(problem, config, x0);
        case Algorithm::RN: return rn_solve(problem, config, x0);
        case Algorithm::BPG: return bpg_solve(problem, config, x0);
    }
    throw SpecError("unknown algorithm");
}

}  // namespace bregman
