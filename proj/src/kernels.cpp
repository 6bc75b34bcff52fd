#include "bregman/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bregman/errors.hpp"
#include "bregman/objectives.hpp"

namespace bregman {

namespace {

using namespace kernel_terms;

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// sgn(x) |x|^e with sgn(0) = 0.
double signed_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), e), x);
}

void require_nonnegative(const Vector& x, const char* who) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x[i] >= 0.0)) throw DomainError(std::string(who) + ": negative coordinate");
}

void require_positive(const Vector& x, const char* who) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x[i] > 0.0)) throw DomainError(std::string(who) + ": nonpositive coordinate");
}

KernelDomain intersect(KernelDomain a, KernelDomain b) {
    if (a == KernelDomain::PositiveOrthant || b == KernelDomain::PositiveOrthant)
        return KernelDomain::PositiveOrthant;
    if (a == KernelDomain::NonnegativeOrthantClosure || b == KernelDomain::NonnegativeOrthantClosure)
        return KernelDomain::NonnegativeOrthantClosure;
    return KernelDomain::AllSpace;
}

}  // namespace

Kernel::Kernel(Variant term) : term_(std::move(term)) {
    std::visit(Overloaded{
                   [&](const SquaredEuclidean& k) { sigma_ = k.weight; },
                   [&](const PPower& k) { sigma_ = k.p == 2.0 ? k.weight : 0.0; },
                   [&](const ShannonEntropy&) {
                       domain_ = KernelDomain::NonnegativeOrthantClosure;
                   },
                   [&](const BurgEntropy&) { domain_ = KernelDomain::PositiveOrthant; },
                   [&](const FixedQuadratic& k) {
                       diagonal_ = false;
                       Eigen::SelfAdjointEigenSolver<Matrix> eig(k.H, Eigen::EigenvaluesOnly);
                       sigma_ = eig.eigenvalues().minCoeff();
                   },
                   [&](const Sum& k) {
                       sigma_ = 0.0;
                       for (const auto& t : k.terms) {
                           domain_ = intersect(domain_, t.domain());
                           sigma_ += t.strong_convexity();
                           diagonal_ = diagonal_ && t.is_diagonal();
                       }
                   },
                   [&](const FPlusRidge& k) {
                       diagonal_ = false;
                       // f convex => kappa-strongly convex.
                       sigma_ = k.f->is_convex() ? k.kappa : 0.0;
                   },
               },
               term_);
}

Kernel Kernel::squared_euclidean(double weight) {
    if (!(weight > 0.0)) throw DomainError("squared_euclidean: weight must be positive");
    return Kernel(SquaredEuclidean{weight});
}

Kernel Kernel::p_power(double p, double weight) {
    if (!(p > 1.0)) throw DomainError("p_power: p must exceed 1");
    if (!(weight >= 0.0)) throw DomainError("p_power: weight must be nonnegative");
    return Kernel(PPower{p, weight});
}

Kernel Kernel::shannon_entropy() { return Kernel(ShannonEntropy{}); }

Kernel Kernel::burg_entropy() { return Kernel(BurgEntropy{}); }

Kernel Kernel::fixed_quadratic(Matrix H) {
    if (H.rows() != H.cols()) throw DomainError("fixed_quadratic: H must be square");
    if (!H.isApprox(H.transpose())) throw DomainError("fixed_quadratic: H must be symmetric");
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success)
        throw SingularHessian("fixed_quadratic: H must be positive definite");
    return Kernel(FixedQuadratic{std::move(H)});
}

Kernel Kernel::sum(std::vector<Kernel> terms) {
    if (terms.empty()) throw DomainError("sum: at least one term required");
    return Kernel(Sum{std::move(terms)});
}

Kernel Kernel::f_plus_ridge(std::shared_ptr<const SmoothObjective> f, double kappa) {
    if (!f) throw DomainError("f_plus_ridge: objective required");
    if (!(kappa > 0.0)) throw DomainError("f_plus_ridge: kappa must be positive");
    return Kernel(FPlusRidge{std::move(f), kappa});
}

Kernel Kernel::augmented(double sigma) const {
    if (sigma == 0.0) return *this;
    return sum({*this, squared_euclidean(sigma)});
}

std::string Kernel::name() const {
    return std::visit(Overloaded{
                          [](const SquaredEuclidean& k) {
                              return k.weight == 1.0 ? std::string("SquaredEuclidean")
                                                     : "SquaredEuclidean(" +
                                                           std::to_string(k.weight) + ")";
                          },
                          [](const PPower& k) {
                              std::ostringstream os;
                              os << "PPower(p=" << k.p << ",w=" << k.weight << ")";
                              return os.str();
                          },
                          [](const ShannonEntropy&) { return std::string("ShannonEntropy"); },
                          [](const BurgEntropy&) { return std::string("BurgEntropy"); },
                          [](const FixedQuadratic&) { return std::string("FixedQuadratic"); },
                          [](const Sum& k) {
                              std::string s = "Sum(";
                              for (std::size_t i = 0; i < k.terms.size(); ++i) {
                                  if (i) s += "+";
                                  s += k.terms[i].name();
                              }
                              return s + ")";
                          },
                          [](const FPlusRidge& k) {
                              std::ostringstream os;
                              os << "FPlusRidge(" << k.f->name() << ",kappa=" << k.kappa << ")";
                              return os.str();
                          },
                      },
                      term_);
}

bool Kernel::in_closure(const Vector& x) const {
    switch (domain_) {
        case KernelDomain::AllSpace: return x.allFinite();
        case KernelDomain::NonnegativeOrthantClosure: return x.allFinite() && (x.array() >= 0.0).all();
        case KernelDomain::PositiveOrthant: return x.allFinite() && (x.array() > 0.0).all();
    }
    return false;
}

bool Kernel::in_interior(const Vector& x) const {
    if (domain_ == KernelDomain::AllSpace) return x.allFinite();
    return x.allFinite() && (x.array() > 0.0).all();
}

double Kernel::value(const Vector& x) const {
    return std::visit(
        Overloaded{
            [&](const SquaredEuclidean& k) { return 0.5 * k.weight * x.squaredNorm(); },
            [&](const PPower& k) {
                return k.weight / k.p * x.array().abs().pow(k.p).sum();
            },
            [&](const ShannonEntropy&) {
                require_nonnegative(x, "ShannonEntropy");
                double s = 0.0;
                for (Eigen::Index i = 0; i < x.size(); ++i)
                    if (x[i] > 0.0) s += x[i] * std::log(x[i]);
                return s;
            },
            [&](const BurgEntropy&) {
                require_positive(x, "BurgEntropy");
                return -x.array().log().sum();
            },
            [&](const FixedQuadratic& k) { return 0.5 * x.dot(k.H * x); },
            [&](const Sum& k) {
                double s = 0.0;
                for (const auto& t : k.terms) s += t.value(x);
                return s;
            },
            [&](const FPlusRidge& k) { return k.f->value(x) + 0.5 * k.kappa * x.squaredNorm(); },
        },
        term_);
}

Vector Kernel::gradient(const Vector& x) const {
    return std::visit(
        Overloaded{
            [&](const SquaredEuclidean& k) -> Vector { return k.weight * x; },
            [&](const PPower& k) -> Vector {
                Vector g(x.size());
                for (Eigen::Index i = 0; i < x.size(); ++i)
                    g[i] = k.weight * signed_pow(x[i], k.p - 1.0);
                return g;
            },
            [&](const ShannonEntropy&) -> Vector {
                require_positive(x, "ShannonEntropy gradient");
                return (x.array().log() + 1.0).matrix();
            },
            [&](const BurgEntropy&) -> Vector {
                require_positive(x, "BurgEntropy gradient");
                return (-x.array().inverse()).matrix();
            },
            [&](const FixedQuadratic& k) -> Vector { return k.H * x; },
            [&](const Sum& k) -> Vector {
                Vector g = Vector::Zero(x.size());
                for (const auto& t : k.terms) g += t.gradient(x);
                return g;
            },
            [&](const FPlusRidge& k) -> Vector { return k.f->gradient(x) + k.kappa * x; },
        },
        term_);
}

Vector Kernel::hessian_diag(const Vector& x, HessianPolicy policy) const {
    if (!diagonal_) throw UnsupportedPair("hessian_diag: kernel " + name() + " is not diagonal");
    Vector h = std::visit(
        Overloaded{
            [&](const SquaredEuclidean& k) -> Vector {
                return Vector::Constant(x.size(), k.weight);
            },
            [&](const PPower& k) -> Vector {
                if (k.weight == 0.0) return Vector::Zero(x.size());
                // pow(0, p - 2) is +inf for p < 2, 1 for p == 2, 0 for p > 2.
                return (k.weight * (k.p - 1.0) * x.array().abs().pow(k.p - 2.0)).matrix();
            },
            [&](const ShannonEntropy&) -> Vector {
                require_positive(x, "ShannonEntropy Hessian");
                return x.array().inverse().matrix();
            },
            [&](const BurgEntropy&) -> Vector {
                require_positive(x, "BurgEntropy Hessian");
                return x.array().square().inverse().matrix();
            },
            [&](const FixedQuadratic&) -> Vector { return {}; },
            [&](const Sum& k) -> Vector {
                Vector h = Vector::Zero(x.size());
                for (const auto& t : k.terms) h += t.hessian_diag(x, HessianPolicy::InfiniteSentinel);
                return h;
            },
            [&](const FPlusRidge&) -> Vector { return {}; },
        },
        term_);
    if (policy == HessianPolicy::Strict && !h.allFinite())
        throw SingularHessian("hessian_diag: non-finite entry for " + name());
    return h;
}

Matrix Kernel::hessian_dense(const Vector& x) const {
    return std::visit(
        Overloaded{
            [&](const FixedQuadratic& k) -> Matrix { return k.H; },
            [&](const FPlusRidge& k) -> Matrix {
                Matrix H = k.f->hessian(x);
                H.diagonal().array() += k.kappa;
                return H;
            },
            [&](const Sum& k) -> Matrix {
                Matrix H = Matrix::Zero(x.size(), x.size());
                for (const auto& t : k.terms) H += t.hessian_dense(x);
                return H;
            },
            [&](const auto&) -> Matrix { return hessian_diag(x).asDiagonal(); },
        },
        term_);
}

Vector Kernel::hessian_apply(const Vector& x, const Vector& v) const {
    if (diagonal_) return hessian_diag(x).cwiseProduct(v);
    return hessian_dense(x) * v;
}

Metric Kernel::metric(const Vector& x) const {
    if (diagonal_) return DiagonalMetric{hessian_diag(x, HessianPolicy::InfiniteSentinel)};
    if (const auto* k = std::get_if<FPlusRidge>(&term_)) {
        HessianParts parts = k->f->hessian_parts(x);
        parts.H.diagonal().array() += k->kappa;
        return DenseMetric{std::move(parts.H), std::move(parts.frozen)};
    }
    return DenseMetric{hessian_dense(x), Matrix(0, x.size())};
}

double metric_quadratic(const Metric& metric, const Vector& d) {
    return std::visit(Overloaded{
                          [&](const DiagonalMetric& m) {
                              double s = 0.0;
                              for (Eigen::Index i = 0; i < d.size(); ++i)
                                  if (d[i] != 0.0) s += m.h[i] * d[i] * d[i];
                              return s;
                          },
                          [&](const DenseMetric& m) {
                              // Moving along a frozen row costs +inf.
                              if (m.frozen.rows() > 0 && (m.frozen * d).cwiseAbs().maxCoeff() >
                                                             1e-12 * (1.0 + d.norm()))
                                  return std::numeric_limits<double>::infinity();
                              return d.dot(m.H * d);
                          },
                      },
                      metric);
}

double bregman_distance(const Kernel& kernel, const Vector& x, const Vector& y) {
    if (!kernel.in_closure(x)) throw DomainError("bregman_distance: x outside the domain closure");
    if (!kernel.in_interior(y)) throw DomainError("bregman_distance: y not interior");
    // Shannon-type terms are summed coordinate-wise in the x log(x/y) form to
    // avoid cancellation between large phi values.
    if (const auto* k = std::get_if<kernel_terms::ShannonEntropy>(&kernel.term())) {
        (void)k;
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double xi = x[i], yi = y[i];
            s += (xi > 0.0 ? xi * std::log(xi / yi) : 0.0) - xi + yi;
        }
        return s;
    }
    if (const auto* k = std::get_if<kernel_terms::Sum>(&kernel.term())) {
        double s = 0.0;
        for (const auto& t : k->terms) s += bregman_distance(t, x, y);
        return s;
    }
    if (const auto* k = std::get_if<kernel_terms::SquaredEuclidean>(&kernel.term()))
        return 0.5 * k->weight * (x - y).squaredNorm();
    if (const auto* k = std::get_if<kernel_terms::FixedQuadratic>(&kernel.term())) {
        const Vector diff = x - y;
        return 0.5 * diff.dot(k->H * diff);
    }
    return kernel.value(x) - kernel.value(y) - kernel.gradient(y).dot(x - y);
}

double approx_bregman_distance(const Kernel& kernel, const Vector& x, const Vector& y) {
    if (!kernel.in_interior(y)) throw DomainError("approx_bregman_distance: y not interior");
    const Vector diff = x - y;
    if (kernel.is_diagonal()) {
        const Vector h = kernel.hessian_diag(y);
        return 0.5 * diff.dot(h.cwiseProduct(diff));
    }
    return 0.5 * diff.dot(kernel.hessian_apply(y, diff));
}

LsmadReport check_lsmad_sampled(const SmoothObjective& f, const Kernel& kernel, double L,
                                const std::vector<std::pair<Vector, Vector>>& pairs) {
    LsmadReport report;
    report.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [x, y] = pairs[i];
        const double fx = f.value(x);
        const double fy = f.value(y);
        const double lhs = std::abs(fx - fy - f.gradient(y).dot(x - y));
        const double rhs = L * bregman_distance(kernel, x, y);
        const double slack = rhs - lhs;
        const double allowance = 1e-10 * (1.0 + std::abs(fx) + std::abs(fy));
        report.worst_slack = std::min(report.worst_slack, slack);
        if (slack < -allowance) report.violations.push_back({i, lhs, rhs, slack});
        ++report.pairs_checked;
    }
    if (pairs.empty()) report.worst_slack = 0.0;
    return report;
}

}  // namespace bregman
