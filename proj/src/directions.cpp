#include "bregman/directions.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bregman/errors.hpp"

namespace bregman {

namespace {

void check_scales(const Vector& h, const char* who) {
    for (Eigen::Index i = 0; i < h.size(); ++i)
        if (!(h[i] > 0.0)) throw InvalidScale(std::string(who) + ": Hessian diagonal must be positive");
}

void check_sizes(const Vector& v, Eigen::Index n, const char* who) {
    if (v.size() != n) throw DomainError(std::string(who) + ": dimension mismatch");
}

double soft_threshold(double z, double tau) {
    // Ties map to zero.
    if (std::abs(z) <= tau) return 0.0;
    return z > 0.0 ? z - tau : z + tau;
}

double diag_quad(const Vector& h, const Vector& d) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] != 0.0) s += h[i] * d[i] * d[i];
    return s;
}

// Frozen rows C (infinite curvature) and an optional equality a^T d = 0:
// minimize over d = Z y with Z an orthonormal basis of null([C; a^T]).
DirectionResult solve_dense_frozen(double lambda, const Vector& v, const Matrix& H,
                                   const Matrix& frozen, const Vector* a, const char* who) {
    const Eigen::Index n = v.size();
    if (frozen.cols() != n) throw DomainError(std::string(who) + ": dimension mismatch");
    Matrix C(frozen.rows() + (a ? 1 : 0), n);
    C.topRows(frozen.rows()) = frozen;
    if (a) C.row(C.rows() - 1) = a->transpose();
    Eigen::ColPivHouseholderQR<Matrix> qr(C.transpose());
    const Eigen::Index r = qr.rank();
    DirectionResult out;
    if (r >= n) {
        out.d = Vector::Zero(n);
        out.rho = 0.0;
        out.metric_quad = 0.0;
        return out;
    }
    const Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix Z = Q.rightCols(n - r);
    Eigen::LLT<Matrix> llt(Z.transpose() * H * Z);
    if (llt.info() != Eigen::Success)
        throw SingularHessian(std::string(who) + ": reduced metric is not positive definite");
    out.d = Z * (-lambda * llt.solve(Z.transpose() * v));
    if (!out.d.allFinite()) throw SingularHessian(std::string(who) + ": non-finite direction");
    out.rho = v.dot(out.d);
    out.metric_quad = out.d.dot(H * out.d);
    return out;
}

}  // namespace

DirectionResult solve_smooth_diagonal(double lambda, const Vector& v, const Vector& h) {
    check_sizes(h, v.size(), "solve_smooth_diagonal");
    check_scales(h, "solve_smooth_diagonal");
    DirectionResult out;
    out.d.resize(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.d[i] = std::isinf(h[i]) ? 0.0 : -lambda * v[i] / h[i];
    out.rho = v.dot(out.d);
    out.metric_quad = diag_quad(h, out.d);
    return out;
}

DirectionResult solve_l1_diagonal(double lambda, const Vector& v, const Vector& h,
                                  const Vector& x, double theta1) {
    check_sizes(h, v.size(), "solve_l1_diagonal");
    check_sizes(x, v.size(), "solve_l1_diagonal");
    check_scales(h, "solve_l1_diagonal");
    if (!(theta1 >= 0.0)) throw DomainError("solve_l1_diagonal: theta1 must be nonnegative");
    DirectionResult out;
    out.d.resize(v.size());
    Vector s(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        s[i] = lambda / h[i];  // 0 for the +inf sentinel
        out.d[i] = s[i] == 0.0 ? 0.0 : soft_threshold(x[i] - s[i] * v[i], theta1 * s[i]) - x[i];
    }
    out.rho = v.dot(out.d) + theta1 * ((x + out.d).lpNorm<1>() - x.lpNorm<1>());
    out.metric_quad = diag_quad(h, out.d);
    out.scales = std::move(s);
    return out;
}

DirectionResult solve_affine_equality(double lambda, const Vector& v, const Vector& h,
                                      const Vector& a) {
    check_sizes(h, v.size(), "solve_affine_equality");
    check_sizes(a, v.size(), "solve_affine_equality");
    check_scales(h, "solve_affine_equality");
    if (a.norm() == 0.0) throw DegenerateConstraint("solve_affine_equality: a is zero");
    const Vector hinv = h.cwiseInverse();  // 0 for +inf entries
    const Vector u = hinv.cwiseProduct(a);
    const double delta = -a.dot(u);
    if (!(delta < 0.0))
        throw DegenerateConstraint("solve_affine_equality: a^T H^{-1} a vanishes");
    const double utv = u.dot(v);

    DirectionResult out;
    out.d = -lambda * hinv.cwiseProduct(v) - (lambda * utv / delta) * u;
    out.mu = lambda * utv / delta;
    out.rho = v.dot(out.d);
    out.metric_quad = diag_quad(h, out.d);
    out.kkt = AffineKKTFactors{u, delta};
    return out;
}

DirectionResult solve_nonneg_l1_diagonal(double lambda, const Vector& v, const Vector& h,
                                         const Vector& x, double theta1) {
    check_sizes(h, v.size(), "solve_nonneg_l1_diagonal");
    check_sizes(x, v.size(), "solve_nonneg_l1_diagonal");
    check_scales(h, "solve_nonneg_l1_diagonal");
    if (!(x.array() > 0.0).all())
        throw DomainError("solve_nonneg_l1_diagonal: x must be strictly positive");
    DirectionResult out;
    out.d.resize(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double floor = -(1.0 - kInteriorMargin) * x[i];
        const double free = std::isinf(h[i]) ? 0.0 : -lambda * (v[i] + theta1) / h[i];
        if (free < floor) {
            out.d[i] = floor;
            out.clamped = true;
        } else {
            out.d[i] = free;
        }
    }
    // g(x + d) - g(x) = theta1 * sum(d) on the orthant.
    out.rho = v.dot(out.d) + theta1 * out.d.sum();
    out.metric_quad = diag_quad(h, out.d);
    return out;
}

DirectionResult solve_nonneg_l1_projected(double lambda, const Vector& v, const Vector& x,
                                          double theta1) {
    check_sizes(x, v.size(), "solve_nonneg_l1_projected");
    if (!(lambda > 0.0)) throw DomainError("solve_nonneg_l1_projected: lambda must be positive");
    if (!(x.array() >= 0.0).all())
        throw DomainError("solve_nonneg_l1_projected: x must be nonnegative");
    DirectionResult out;
    out.d = (-lambda * (v.array() + theta1)).max(-x.array()).matrix();
    out.clamped = (out.d.array() == -x.array()).any();
    out.rho = v.dot(out.d) + theta1 * out.d.sum();
    out.metric_quad = out.d.squaredNorm();
    return out;
}

DirectionResult solve_smooth_dense(double lambda, const Vector& v, const Matrix& H) {
    if (H.rows() != v.size() || H.cols() != v.size())
        throw DomainError("solve_smooth_dense: dimension mismatch");
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success)
        throw SingularHessian("solve_smooth_dense: metric is not positive definite");
    DirectionResult out;
    out.d = -lambda * llt.solve(v);
    if (!out.d.allFinite()) throw SingularHessian("solve_smooth_dense: non-finite direction");
    out.rho = v.dot(out.d);
    out.metric_quad = out.d.dot(H * out.d);
    return out;
}

DirectionResult solve_affine_equality_dense(double lambda, const Vector& v, const Matrix& H,
                                            const Vector& a) {
    if (H.rows() != v.size() || H.cols() != v.size() || a.size() != v.size())
        throw DomainError("solve_affine_equality_dense: dimension mismatch");
    if (a.norm() == 0.0) throw DegenerateConstraint("solve_affine_equality_dense: a is zero");
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success)
        throw SingularHessian("solve_affine_equality_dense: metric is not positive definite");
    const Vector u = llt.solve(a);
    const Vector hv = llt.solve(v);
    const double delta = -a.dot(u);
    if (!(delta < 0.0))
        throw DegenerateConstraint("solve_affine_equality_dense: a^T H^{-1} a vanishes");
    const double utv = u.dot(v);

    DirectionResult out;
    out.d = -lambda * hv - (lambda * utv / delta) * u;
    if (!out.d.allFinite()) throw SingularHessian("solve_affine_equality_dense: non-finite direction");
    out.mu = lambda * utv / delta;
    out.rho = v.dot(out.d);
    out.metric_quad = out.d.dot(H * out.d);
    out.kkt = AffineKKTFactors{u, delta};
    return out;
}

DirectionResult solve_subproblem(const Regularizer& g, const Metric& metric, double lambda,
                                 const Vector& v, const Vector& x) {
    if (const auto* diag = std::get_if<DiagonalMetric>(&metric)) {
        switch (g.kind()) {
            case RegularizerKind::Zero: return solve_smooth_diagonal(lambda, v, diag->h);
            case RegularizerKind::L1: return solve_l1_diagonal(lambda, v, diag->h, x, g.theta1());
            case RegularizerKind::AffineEquality:
                return solve_affine_equality(lambda, v, diag->h, g.a());
            case RegularizerKind::L1PlusNonneg:
                return solve_nonneg_l1_diagonal(lambda, v, diag->h, x, g.theta1());
        }
    }
    const auto& dense = std::get<DenseMetric>(metric);
    switch (g.kind()) {
        case RegularizerKind::Zero:
            if (dense.frozen.rows() > 0)
                return solve_dense_frozen(lambda, v, dense.H, dense.frozen, nullptr,
                                          "solve_smooth_dense");
            return solve_smooth_dense(lambda, v, dense.H);
        case RegularizerKind::AffineEquality:
            if (dense.frozen.rows() > 0) {
                if (g.a().norm() == 0.0)
                    throw DegenerateConstraint("solve_affine_equality_dense: a is zero");
                return solve_dense_frozen(lambda, v, dense.H, dense.frozen, &g.a(),
                                          "solve_affine_equality_dense");
            }
            return solve_affine_equality_dense(lambda, v, dense.H, g.a());
        default:
            throw UnsupportedPair("solve_subproblem: " + g.name() +
                                  " needs a diagonal metric for a closed form");
    }
}

EntropyStep bpg_entropy_step(double lambda, const Vector& v, const Vector& x, double theta1) {
    check_sizes(x, v.size(), "bpg_entropy_step");
    if (!(lambda > 0.0)) throw DomainError("bpg_entropy_step: lambda must be positive");
    if (!(x.array() > 0.0).all()) throw DomainError("bpg_entropy_step: x must be strictly positive");
    EntropyStep out;
    out.x_next.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double arg = -lambda * (v[i] + theta1);
        if (arg > kExpArgumentClamp || arg < -kExpArgumentClamp) {
            arg = std::clamp(arg, -kExpArgumentClamp, kExpArgumentClamp);
            out.clamped = true;
        }
        out.x_next[i] = x[i] * std::exp(arg);
    }
    return out;
}

}  // namespace bregman
