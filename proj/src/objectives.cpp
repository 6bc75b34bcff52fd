#include "bregman/objectives.hpp"

#include <cmath>
#include <vector>
#include <sstream>

#include "bregman/errors.hpp"
#include "bregman/linalg.hpp"

namespace bregman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), e), x);
}

}  // namespace

SmoothObjective::SmoothObjective(ObjectiveKind kind, Matrix A, Vector b, double theta_p, double p)
    : kind_(kind), A_(std::move(A)), b_(std::move(b)), theta_p_(theta_p), p_(p) {
    if (A_.rows() != b_.size()) throw DomainError("objective: A rows and b size differ");
    if (A_.size() == 0) throw DomainError("objective: empty matrix");
    if (kind_ != ObjectiveKind::KLLinear && !(p_ > 1.0))
        throw DomainError("objective: p must exceed 1");
    lambda_max_ = power_method(A_, 1e-10, 5000).estimate;
    if (kind_ == ObjectiveKind::LpLeastSquares) gram_ = A_.transpose() * A_;
}

SmoothObjective SmoothObjective::lp_least_squares(Matrix A, Vector b, double theta_p, double p) {
    if (!(theta_p >= 0.0)) throw DomainError("lp_least_squares: theta_p must be nonnegative");
    return SmoothObjective(ObjectiveKind::LpLeastSquares, std::move(A), std::move(b), theta_p, p);
}

SmoothObjective SmoothObjective::lp_loss(Matrix A, Vector b, double p) {
    return SmoothObjective(ObjectiveKind::LpLoss, std::move(A), std::move(b), 0.0, p);
}

SmoothObjective SmoothObjective::kl_linear(Matrix A, Vector b) {
    if ((A.array() < 0.0).any()) throw DomainError("kl_linear: A must be entrywise nonnegative");
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        if (std::abs(A.col(j).sum() - 1.0) > 1e-12)
            throw DomainError("kl_linear: columns of A must sum to 1");
    if (!(b.array() > 0.0).all()) throw DomainError("kl_linear: b must be strictly positive");
    return SmoothObjective(ObjectiveKind::KLLinear, std::move(A), std::move(b), 0.0, 1.0);
}

std::string SmoothObjective::name() const {
    std::ostringstream os;
    switch (kind_) {
        case ObjectiveKind::LpLeastSquares:
            os << "LpLeastSquares(p=" << p_ << ",theta_p=" << theta_p_ << ")";
            break;
        case ObjectiveKind::LpLoss: os << "LpLoss(p=" << p_ << ")"; break;
        case ObjectiveKind::KLLinear: os << "KLLinear"; break;
    }
    return os.str();
}

double SmoothObjective::value(const Vector& x) const {
    const Vector Ax = A_ * x;
    switch (kind_) {
        case ObjectiveKind::LpLeastSquares:
            return 0.5 * (Ax - b_).squaredNorm() +
                   theta_p_ / p_ * x.array().abs().pow(p_).sum();
        case ObjectiveKind::LpLoss:
            return (Ax - b_).array().abs().pow(p_).sum() / p_;
        case ObjectiveKind::KLLinear: {
            double s = 0.0;
            for (Eigen::Index i = 0; i < Ax.size(); ++i) {
                const double y = Ax[i];
                if (!(y > 0.0)) throw DomainError("KLLinear: (Ax)_i must be positive");
                s += y * std::log(y / b_[i]) + b_[i] - y;
            }
            return s;
        }
    }
    return kInf;
}

Vector SmoothObjective::gradient(const Vector& x) const {
    const Vector Ax = A_ * x;
    switch (kind_) {
        case ObjectiveKind::LpLeastSquares: {
            Vector g = A_.transpose() * (Ax - b_);
            for (Eigen::Index i = 0; i < x.size(); ++i)
                g[i] += theta_p_ * signed_pow(x[i], p_ - 1.0);
            return g;
        }
        case ObjectiveKind::LpLoss: {
            Vector w(Ax.size());
            for (Eigen::Index i = 0; i < Ax.size(); ++i) w[i] = signed_pow(Ax[i] - b_[i], p_ - 1.0);
            return A_.transpose() * w;
        }
        case ObjectiveKind::KLLinear: {
            if (!(Ax.array() > 0.0).all())
                throw DomainError("KLLinear gradient: (Ax)_i must be positive");
            return A_.transpose() * (Ax.array() / b_.array()).log().matrix();
        }
    }
    return {};
}

HessianParts SmoothObjective::hessian_parts(const Vector& x) const {
    HessianParts out;
    std::vector<Eigen::Index> frozen;
    switch (kind_) {
        case ObjectiveKind::LpLeastSquares: {
            out.H = gram_;
            if (theta_p_ > 0.0) {
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    const double c = theta_p_ * (p_ - 1.0) * std::pow(std::abs(x[i]), p_ - 2.0);
                    if (std::isfinite(c))
                        out.H(i, i) += c;
                    else
                        frozen.push_back(i);
                }
            }
            out.frozen = Matrix::Zero(static_cast<Eigen::Index>(frozen.size()), x.size());
            for (std::size_t k = 0; k < frozen.size(); ++k) out.frozen(k, frozen[k]) = 1.0;
            return out;
        }
        case ObjectiveKind::LpLoss: {
            const Vector r = A_ * x - b_;
            Vector w(r.size());
            for (Eigen::Index i = 0; i < r.size(); ++i) {
                w[i] = (p_ - 1.0) * std::pow(std::abs(r[i]), p_ - 2.0);
                if (!std::isfinite(w[i])) {
                    w[i] = 0.0;
                    frozen.push_back(i);
                }
            }
            out.H = A_.transpose() * w.asDiagonal() * A_;
            out.frozen.resize(static_cast<Eigen::Index>(frozen.size()), x.size());
            for (std::size_t k = 0; k < frozen.size(); ++k) out.frozen.row(k) = A_.row(frozen[k]);
            return out;
        }
        case ObjectiveKind::KLLinear: {
            const Vector Ax = A_ * x;
            if (!(Ax.array() > 0.0).all())
                throw DomainError("KLLinear Hessian: (Ax)_i must be positive");
            out.H = A_.transpose() * Ax.array().inverse().matrix().asDiagonal() * A_;
            out.frozen.resize(0, x.size());
            return out;
        }
    }
    return out;
}

Matrix SmoothObjective::hessian(const Vector& x) const {
    HessianParts parts = hessian_parts(x);
    if (parts.frozen.rows() > 0) {
        throw SingularHessian(kind_ == ObjectiveKind::LpLoss
                                  ? "LpLoss Hessian: zero residual with p < 2"
                                  : "LpLeastSquares Hessian: zero coordinate with p < 2");
    }
    return std::move(parts.H);
}

Regularizer Regularizer::zero() { return {}; }

Regularizer Regularizer::l1(double theta1) {
    if (!(theta1 >= 0.0)) throw DomainError("l1: theta1 must be nonnegative");
    Regularizer g;
    g.kind_ = RegularizerKind::L1;
    g.theta1_ = theta1;
    return g;
}

Regularizer Regularizer::affine_equality(Vector a, double gamma) {
    if (a.size() == 0 || a.norm() == 0.0)
        throw DegenerateConstraint("affine_equality: a must be nonzero");
    Regularizer g;
    g.kind_ = RegularizerKind::AffineEquality;
    g.a_ = std::move(a);
    g.gamma_ = gamma;
    return g;
}

Regularizer Regularizer::l1_plus_nonneg(double theta1) {
    if (!(theta1 >= 0.0)) throw DomainError("l1_plus_nonneg: theta1 must be nonnegative");
    Regularizer g;
    g.kind_ = RegularizerKind::L1PlusNonneg;
    g.theta1_ = theta1;
    return g;
}

std::string Regularizer::name() const {
    std::ostringstream os;
    switch (kind_) {
        case RegularizerKind::Zero: os << "Zero"; break;
        case RegularizerKind::L1: os << "L1(theta1=" << theta1_ << ")"; break;
        case RegularizerKind::AffineEquality: os << "AffineEquality(gamma=" << gamma_ << ")"; break;
        case RegularizerKind::L1PlusNonneg: os << "L1PlusNonneg(theta1=" << theta1_ << ")"; break;
    }
    return os.str();
}

double Regularizer::value(const Vector& x) const {
    switch (kind_) {
        case RegularizerKind::Zero: return 0.0;
        case RegularizerKind::L1: return theta1_ * x.lpNorm<1>();
        case RegularizerKind::AffineEquality: {
            const double scale = std::max(1.0, a_.cwiseProduct(x).lpNorm<1>());
            return std::abs(a_.dot(x) - gamma_) <= 1e-9 * scale ? 0.0 : kInf;
        }
        case RegularizerKind::L1PlusNonneg:
            if (!(x.array() >= 0.0).all()) return kInf;
            return theta1_ * x.sum();
    }
    return kInf;
}

CompositeProblem::CompositeProblem(std::shared_ptr<const SmoothObjective> f_, Regularizer g_,
                                   Kernel kernel_, std::optional<Vector> ground_truth_)
    : f(std::move(f_)), g(std::move(g_)), kernel(std::move(kernel_)),
      ground_truth(std::move(ground_truth_)) {
    if (!f) throw DomainError("CompositeProblem: objective required");
    if (g.kind() == RegularizerKind::AffineEquality && g.a().size() != f->dim())
        throw DomainError("CompositeProblem: constraint dimension mismatch");
    if (ground_truth && ground_truth->size() != f->dim())
        throw DomainError("CompositeProblem: ground truth dimension mismatch");
    if (g.kind() == RegularizerKind::AffineEquality &&
        kernel.domain() != KernelDomain::AllSpace && !(g.a().array() > 0.0).any() &&
        g.gamma() > 0.0)
        throw DomainError("CompositeProblem: affine set misses the kernel interior");
}

double CompositeProblem::psi(const Vector& x) const {
    const double gx = g.value(x);
    if (!std::isfinite(gx)) return kInf;
    try {
        const double fx = f->value(x);
        return std::isfinite(fx) ? fx + gx : kInf;
    } catch (const DomainError&) {
        return kInf;
    }
}

double f_value(const SmoothObjective& f, const Vector& x) { return f.value(x); }
Vector f_gradient(const SmoothObjective& f, const Vector& x) { return f.gradient(x); }
Matrix f_hessian(const SmoothObjective& f, const Vector& x) { return f.hessian(x); }
double g_value(const Regularizer& g, const Vector& x) { return g.value(x); }
double psi_value(const CompositeProblem& problem, const Vector& x) { return problem.psi(x); }

namespace {

// phi = 1/2 ||x||^2 + (1/p) ||x||_p^p with the objective's p.
bool is_lp_kernel(const Kernel& kernel, double p) {
    const auto* sum = std::get_if<kernel_terms::Sum>(&kernel.term());
    if (!sum || sum->terms.size() != 2) return false;
    bool euclid = false, power = false;
    for (const auto& t : sum->terms) {
        if (const auto* e = std::get_if<kernel_terms::SquaredEuclidean>(&t.term()))
            euclid = euclid || e->weight == 1.0;
        if (const auto* q = std::get_if<kernel_terms::PPower>(&t.term()))
            power = power || (q->p == p && q->weight == 1.0);
    }
    return euclid && power;
}

// Shannon entropy, optionally plus a squared Euclidean term.
bool is_entropy_kernel(const Kernel& kernel) {
    if (std::holds_alternative<kernel_terms::ShannonEntropy>(kernel.term())) return true;
    const auto* sum = std::get_if<kernel_terms::Sum>(&kernel.term());
    if (!sum) return false;
    bool entropy = false;
    for (const auto& t : sum->terms) {
        if (std::holds_alternative<kernel_terms::ShannonEntropy>(t.term()))
            entropy = true;
        else if (!std::holds_alternative<kernel_terms::SquaredEuclidean>(t.term()))
            return false;
    }
    return entropy;
}

}  // namespace

double lsmad_constant(const SmoothObjective& f, const Kernel& kernel) {
    if (const auto* r = std::get_if<kernel_terms::FPlusRidge>(&kernel.term())) {
        // L phi - f = (kappa / 2) ||.||^2 and L phi + f = 2 f + ... are convex at L = 1.
        if (r->f.get() == &f && f.is_convex()) return 1.0;
        throw UnsupportedPair("lsmad_constant: FPlusRidge built on a different objective");
    }
    switch (f.kind()) {
        case ObjectiveKind::LpLeastSquares:
            if (is_lp_kernel(kernel, f.p())) return f.spectral_norm_sq() + f.theta_p();
            break;
        case ObjectiveKind::KLLinear:
            if (is_entropy_kernel(kernel)) return 1.0;
            break;
        case ObjectiveKind::LpLoss: break;
    }
    throw UnsupportedPair("lsmad_constant: no certificate for " + f.name() + " with " +
                          kernel.name());
}

double euclidean_step_constant(const SmoothObjective& f) {
    switch (f.kind()) {
        case ObjectiveKind::LpLeastSquares: return f.spectral_norm_sq() + f.theta_p();
        case ObjectiveKind::LpLoss: return f.spectral_norm_sq();
        case ObjectiveKind::KLLinear: return 1.0;
    }
    return 1.0;
}

}  // namespace bregman
