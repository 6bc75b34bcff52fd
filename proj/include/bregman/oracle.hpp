#pragma once

// Derivative-free reference minimizer for the direction subproblem. It shares
// no formulas with the closed-form solvers: every coordinate is minimized by
// golden-section search on a bracket, sweeps repeat until the iterate settles,
// and a single equality constraint is handled by bisection on its multiplier.

#include "bregman/kernels.hpp"
#include "bregman/objectives.hpp"

namespace bregman {

struct OracleConfig {
    double tol = 1e-10;             // sweep stopping tolerance (sup-norm change)
    long max_sweeps = 1'000'000;    // coordinate-descent cap
    int bisection_steps = 200;      // multiplier bisection for equality constraints
};

/// Minimizer of <v, d> + g(x + d) + 1/(2 lambda) <H d, d> over x + d in dom g.
/// Nonnegativity is imposed on the closed orthant. Throws NoConvergence.
Vector brute_force_direction(const Regularizer& g, const Metric& metric, double lambda,
                             const Vector& v, const Vector& x, const OracleConfig& config = {});

/// Subproblem objective value, +inf outside dom g.
double subproblem_objective(const Regularizer& g, const Metric& metric, double lambda,
                            const Vector& v, const Vector& x, const Vector& d);

}  // namespace bregman
