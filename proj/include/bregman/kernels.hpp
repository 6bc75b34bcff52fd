#pragma once

// Kernel generating distances and the (approximate) Bregman distances they
// induce.
//
//   D_phi(x, y)  = phi(x) - phi(y) - <grad phi(y), x - y>
//   D~_phi(x, y) = 1/2 <hess phi(y) (x - y), x - y>
//
// Kernels are immutable values; every member function is const and safe to
// call concurrently.

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bregman/types.hpp"

namespace bregman {

class SmoothObjective;

enum class KernelDomain {
    AllSpace,
    NonnegativeOrthantClosure,  // closure of the positive orthant
    PositiveOrthant,            // open orthant, closure excluded
};

/// How diagonal Hessians report entries that blow up (|x_i|^(p-2) at x_i = 0
/// with p in (1, 2)).
enum class HessianPolicy {
    Strict,             // throw SingularHessian
    InfiniteSentinel,   // return +inf; direction solvers map it to a zero scale
};

namespace kernel_terms {

struct SquaredEuclidean {
    double weight = 1.0;  // (weight / 2) ||x||^2
};

struct PPower {
    double p;
    double weight = 1.0;  // (weight / p) ||x||_p^p
};

struct ShannonEntropy {};  // sum x_i log x_i, 0 log 0 = 0

struct BurgEntropy {};  // -sum log x_i

struct FixedQuadratic {
    Matrix H;  // 1/2 x^T H x, H symmetric positive definite
};

struct FPlusRidge {
    std::shared_ptr<const SmoothObjective> f;
    double kappa;  // f(x) + (kappa / 2) ||x||^2
};

}  // namespace kernel_terms

class Kernel;

namespace kernel_terms {
struct Sum {
    std::vector<Kernel> terms;
};
}  // namespace kernel_terms

struct DiagonalMetric {
    Vector h;  // may contain +inf sentinels
};

struct DenseMetric {
    Matrix H;
    /// Rows c with infinite curvature along c; the subproblem keeps C d = 0
    /// (the dense analogue of the h_i = +inf sentinel). Usually empty.
    Matrix frozen;
};

using Metric = std::variant<DiagonalMetric, DenseMetric>;

class Kernel {
public:
    using Variant = std::variant<kernel_terms::SquaredEuclidean, kernel_terms::PPower,
                                 kernel_terms::ShannonEntropy, kernel_terms::BurgEntropy,
                                 kernel_terms::FixedQuadratic, kernel_terms::Sum,
                                 kernel_terms::FPlusRidge>;

    static Kernel squared_euclidean(double weight = 1.0);
    static Kernel p_power(double p, double weight = 1.0);
    static Kernel shannon_entropy();
    static Kernel burg_entropy();
    static Kernel fixed_quadratic(Matrix H);
    static Kernel sum(std::vector<Kernel> terms);
    static Kernel f_plus_ridge(std::shared_ptr<const SmoothObjective> f, double kappa);

    /// phi + (sigma / 2) ||.||^2; returns *this unchanged when sigma == 0.
    Kernel augmented(double sigma) const;

    const Variant& term() const { return term_; }
    KernelDomain domain() const { return domain_; }
    /// Modulus of strong convexity on the interior (0 when unknown).
    double strong_convexity() const { return sigma_; }
    /// True when the Hessian is diagonal at every interior point.
    bool is_diagonal() const { return diagonal_; }
    std::string name() const;

    bool in_closure(const Vector& x) const;
    bool in_interior(const Vector& x) const;

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    /// Diagonal kernels only.
    Vector hessian_diag(const Vector& x, HessianPolicy policy = HessianPolicy::Strict) const;
    Matrix hessian_dense(const Vector& x) const;
    Vector hessian_apply(const Vector& x, const Vector& v) const;

    /// Metric of the direction subproblem at x: the Hessian diagonal (with
    /// +inf sentinels) for diagonal kernels, the dense Hessian otherwise
    /// (FPlusRidge moves infinite-curvature directions into `frozen`).
    Metric metric(const Vector& x) const;

private:
    explicit Kernel(Variant term);

    Variant term_;
    KernelDomain domain_ = KernelDomain::AllSpace;
    double sigma_ = 0.0;
    bool diagonal_ = true;
};

double bregman_distance(const Kernel& kernel, const Vector& x, const Vector& y);
double approx_bregman_distance(const Kernel& kernel, const Vector& x, const Vector& y);

/// <H d, d> for a subproblem metric; entries h_i = +inf contribute 0 when d_i == 0.
double metric_quadratic(const Metric& metric, const Vector& d);

struct LsmadViolation {
    std::size_t pair_index;
    double lhs;    // |f(x) - f(y) - <grad f(y), x - y>|
    double rhs;    // L * D_phi(x, y)
    double slack;  // rhs - lhs (negative on violation)
};

struct LsmadReport {
    std::size_t pairs_checked = 0;
    double worst_slack = 0.0;  // smallest rhs - lhs over all pairs
    std::vector<LsmadViolation> violations;
    bool passed() const { return violations.empty(); }
};

/// Sampled check of the extended descent lemma for the pair (f, kernel).
/// A pair is a violation when lhs exceeds rhs by more than a relative
/// rounding allowance of 1e-10 * (1 + |f(x)| + |f(y)|).
LsmadReport check_lsmad_sampled(const SmoothObjective& f, const Kernel& kernel, double L,
                                const std::vector<std::pair<Vector, Vector>>& pairs);

}  // namespace bregman
