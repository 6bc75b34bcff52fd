#pragma once

// Closed-form solvers for the direction subproblem
//
//   min_d  <v, d> + g(x + d) + 1/(2 lambda) <H d, d>,
//
// with v = grad f(x) and H the kernel Hessian at x, plus the exact BPG step for
// the Shannon entropy kernel. A diagonal entry h_i = +inf means s_i = lambda / h_i
// = 0, so coordinate i is frozen (d_i = 0).

#include <optional>

#include "bregman/kernels.hpp"
#include "bregman/objectives.hpp"
#include "bregman/types.hpp"

namespace bregman {

/// Keeps x + d strictly inside the positive orthant: d_i >= -(1 - margin) x_i.
inline constexpr double kInteriorMargin = 1e-12;

/// Bound on |lambda (v_i + theta1)| in the multiplicative entropy step.
inline constexpr double kExpArgumentClamp = 700.0;

struct AffineKKTFactors {
    Vector u;      // H^{-1} a
    double delta;  // -a^T H^{-1} a
};

struct DirectionResult {
    Vector d;
    /// <v, d> + g(x + d) - g(x)
    double rho = 0.0;
    /// <H d, d>
    double metric_quad = 0.0;
    std::optional<double> mu;
    std::optional<Vector> scales;
    std::optional<AffineKKTFactors> kkt;
    /// The interior clamp was active for at least one coordinate.
    bool clamped = false;
};

DirectionResult solve_smooth_diagonal(double lambda, const Vector& v, const Vector& h);

/// Per coordinate: d_i = soft_{theta1 s_i}(x_i - s_i v_i) - x_i, s_i = lambda / h_i.
DirectionResult solve_l1_diagonal(double lambda, const Vector& v, const Vector& h,
                                  const Vector& x, double theta1);

/// Single equality constraint a^T (x + d) = a^T x via the block inverse of the
/// KKT matrix [H a; a^T 0].
DirectionResult solve_affine_equality(double lambda, const Vector& v, const Vector& h,
                                      const Vector& a);

/// Objective theta1 * sum(x + d) on the orthant:
/// d_i = max(-(1 - margin) x_i, -lambda (v_i + theta1) / h_i).
DirectionResult solve_nonneg_l1_diagonal(double lambda, const Vector& v, const Vector& h,
                                         const Vector& x, double theta1);

/// Euclidean prox on the closed orthant (h = 1, no interior margin):
/// d_i = max(-x_i, -lambda (v_i + theta1)). Needs x >= 0.
DirectionResult solve_nonneg_l1_projected(double lambda, const Vector& v, const Vector& x,
                                          double theta1);

/// Dense symmetric positive definite H (regularized Newton).
DirectionResult solve_smooth_dense(double lambda, const Vector& v, const Matrix& H);
DirectionResult solve_affine_equality_dense(double lambda, const Vector& v, const Matrix& H,
                                            const Vector& a);

/// Dispatches on the regularizer and the metric shape. Throws UnsupportedPair
/// for non-separable combinations (dense metric with L1 terms).
DirectionResult solve_subproblem(const Regularizer& g, const Metric& metric, double lambda,
                                 const Vector& v, const Vector& x);

struct EntropyStep {
    Vector x_next;
    bool clamped = false;
};

/// BPG with phi = sum x log x: x+_i = x_i exp(-lambda (v_i + theta1)).
EntropyStep bpg_entropy_step(double lambda, const Vector& v, const Vector& x, double theta1);

}  // namespace bregman
