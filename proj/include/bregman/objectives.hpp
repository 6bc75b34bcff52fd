#pragma once

// Smooth parts f, convex parts g and the composite Psi = f + g.

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "bregman/kernels.hpp"
#include "bregman/types.hpp"

namespace bregman {

enum class ObjectiveKind {
    LpLeastSquares,  // 1/2 ||Ax - b||^2 + (theta_p / p) ||x||_p^p
    LpLoss,          // (1/p) ||Ax - b||_p^p
    KLLinear,        // D_KL(Ax, b)
};

/// Hessian with the directions of infinite curvature split off: for p < 2 a
/// zero residual (LpLoss) or a zero coordinate (LpLeastSquares) makes the
/// Hessian blow up along a_i or e_i. Those rows are returned in `frozen` and
/// left out of H.
struct HessianParts {
    Matrix H;
    Matrix frozen;  // k x n, possibly empty
};

class SmoothObjective {
public:
    static SmoothObjective lp_least_squares(Matrix A, Vector b, double theta_p, double p);
    static SmoothObjective lp_loss(Matrix A, Vector b, double p);
    /// A must be entrywise nonnegative with unit column sums, b strictly positive.
    static SmoothObjective kl_linear(Matrix A, Vector b);

    ObjectiveKind kind() const { return kind_; }
    std::string name() const;
    Eigen::Index dim() const { return A_.cols(); }
    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }
    double p() const { return p_; }
    double theta_p() const { return theta_p_; }
    /// lambda_max(A^T A), estimated once at construction.
    double spectral_norm_sq() const { return lambda_max_; }
    /// Every catalog objective is convex.
    bool is_convex() const { return true; }

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    /// Throws SingularHessian where a curvature is infinite.
    Matrix hessian(const Vector& x) const;
    HessianParts hessian_parts(const Vector& x) const;

private:
    SmoothObjective(ObjectiveKind kind, Matrix A, Vector b, double theta_p, double p);

    ObjectiveKind kind_;
    Matrix A_;
    Vector b_;
    double theta_p_ = 0.0;
    double p_ = 2.0;
    double lambda_max_ = 0.0;
    Matrix gram_;  // A^T A, LpLeastSquares only
};

enum class RegularizerKind { Zero, L1, AffineEquality, L1PlusNonneg };

class Regularizer {
public:
    static Regularizer zero();
    static Regularizer l1(double theta1);
    static Regularizer affine_equality(Vector a, double gamma);
    /// theta1 * sum(x) on x >= 0, +inf elsewhere.
    static Regularizer l1_plus_nonneg(double theta1);

    RegularizerKind kind() const { return kind_; }
    std::string name() const;
    double theta1() const { return theta1_; }
    const Vector& a() const { return a_; }
    double gamma() const { return gamma_; }

    /// +inf outside dom g. The affine set is matched up to a relative
    /// tolerance of 1e-9 * max(1, sum |a_i x_i|).
    double value(const Vector& x) const;

private:
    RegularizerKind kind_ = RegularizerKind::Zero;
    double theta1_ = 0.0;
    Vector a_;
    double gamma_ = 0.0;
};

struct CompositeProblem {
    std::shared_ptr<const SmoothObjective> f;
    Regularizer g;
    Kernel kernel;
    std::optional<Vector> ground_truth;

    CompositeProblem(std::shared_ptr<const SmoothObjective> f, Regularizer g, Kernel kernel,
                     std::optional<Vector> ground_truth = std::nullopt);

    Eigen::Index dim() const { return f->dim(); }
    /// f + g, +inf wherever either is undefined.
    double psi(const Vector& x) const;
};

double f_value(const SmoothObjective& f, const Vector& x);
Vector f_gradient(const SmoothObjective& f, const Vector& x);
Matrix f_hessian(const SmoothObjective& f, const Vector& x);
double g_value(const Regularizer& g, const Vector& x);
double psi_value(const CompositeProblem& problem, const Vector& x);

/// L for which (f, kernel) is L-smad. Throws UnsupportedPair outside the
/// catalog.
double lsmad_constant(const SmoothObjective& f, const Kernel& kernel);

/// Step constant used by the Euclidean baselines (PG stepsize 1/L, PGL initial
/// estimate).
double euclidean_step_constant(const SmoothObjective& f);

}  // namespace bregman
