#include "bregman/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <limits>

#include "bregman/errors.hpp"

namespace bregman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double golden_section(const std::function<double(double)>& q, double lo, double hi) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double qc = q(c), qd = q(d);
    for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (qc <= qd) {
            b = d;
            d = c;
            qd = qc;
            c = b - ratio * (b - a);
            qc = q(c);
        } else {
            a = c;
            c = d;
            qc = qd;
            d = a + ratio * (b - a);
            qd = q(d);
        }
    }
    // Golden section pins the argmin only to ~sqrt(eps) of the bracket; one
    // parabola through the surviving points is exact on a smooth quadratic piece.
    double best = 0.5 * (a + b), qbest = q(best);
    double vertex = best;
    {
        const double x1 = c, x2 = d, x3 = best;
        const double f1 = qc, f2 = qd, f3 = qbest;
        const double den = (x1 - x2) * (x1 - x3) * (x2 - x3);
        if (den != 0.0) {
            const double A = (x3 * (f2 - f1) + x2 * (f1 - f3) + x1 * (f3 - f2)) / den;
            const double B = (x3 * x3 * (f1 - f2) + x2 * x2 * (f3 - f1) + x1 * x1 * (f2 - f3)) / den;
            if (A > 0.0) vertex = -B / (2.0 * A);
        }
    }
    for (double cand : {lo, hi, vertex}) {
        if (!(cand >= lo && cand <= hi)) continue;
        const double qv = q(cand);
        if (qv < qbest) {
            qbest = qv;
            best = cand;
        }
    }
    return best;
}

double coordinate_penalty(const Regularizer& g, double xi, double ui) {
    switch (g.kind()) {
        case RegularizerKind::L1: return g.theta1() * std::abs(xi + ui);
        case RegularizerKind::L1PlusNonneg:
            return xi + ui < 0.0 ? kInf : g.theta1() * (xi + ui);
        default: return 0.0;
    }
}

// Coordinate descent on <c, d> + sum_i pen_i(x_i + d_i) + 1/(2 lambda) d^T H d.
Vector coordinate_descent(const Regularizer& g, const Metric& metric, double lambda,
                          const Vector& c, const Vector& x, const OracleConfig& config) {
    const Eigen::Index n = c.size();
    Vector d = Vector::Zero(n);
    const auto* diag = std::get_if<DiagonalMetric>(&metric);
    const auto* dense = std::get_if<DenseMetric>(&metric);

    for (long sweep = 0; sweep < config.max_sweeps; ++sweep) {
        double change = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double hii = diag ? diag->h[i] : dense->H(i, i);
            if (std::isinf(hii)) {
                d[i] = 0.0;
                continue;
            }
            double lin = c[i];
            if (dense) {
                for (Eigen::Index j = 0; j < n; ++j)
                    if (j != i) lin += dense->H(i, j) * d[j] / lambda;
            }
            const double curv = hii / lambda;
            auto q = [&](double u) {
                return lin * u + 0.5 * curv * u * u + coordinate_penalty(g, x[i], u);
            };
            const double theta = g.kind() == RegularizerKind::Zero ||
                                         g.kind() == RegularizerKind::AffineEquality
                                     ? 0.0
                                     : g.theta1();
            const double radius = (std::abs(lin) + theta) / curv + std::abs(x[i]) + 1e-300;
            double lo = -radius, hi = radius;
            if (g.kind() == RegularizerKind::L1PlusNonneg) lo = std::max(lo, -x[i]);
            const double u = golden_section(q, lo, hi);
            change = std::max(change, std::abs(u - d[i]));
            d[i] = u;
        }
        if (diag || change <= config.tol) return d;
    }
    throw NoConvergence("brute_force_direction: coordinate descent did not settle");
}

}  // namespace

double subproblem_objective(const Regularizer& g, const Metric& metric, double lambda,
                            const Vector& v, const Vector& x, const Vector& d) {
    const double gx = g.value(x + d);
    if (!std::isfinite(gx)) return kInf;
    return v.dot(d) + gx + metric_quadratic(metric, d) / (2.0 * lambda);
}

namespace {

// Dense metric, smooth g: minimize the quadratic through a spectral
// decomposition, on an orthonormal basis of {d : a^T d = 0} for the equality case.
// Frozen rows are added to the constraints.
Vector dense_spectral(const Regularizer& g, const DenseMetric& metric, double lambda,
                      const Vector& v) {
    const Eigen::Index n = v.size();
    const Matrix& H = metric.H;
    Matrix Z = Matrix::Identity(n, n);
    const bool eq = g.kind() == RegularizerKind::AffineEquality;
    const Eigen::Index k = metric.frozen.rows() + (eq ? 1 : 0);
    if (k > 0) {
        Matrix C(n, k);
        if (metric.frozen.rows() > 0) C.leftCols(metric.frozen.rows()) = metric.frozen.transpose();
        if (eq) C.col(k - 1) = g.a();
        Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeFullU);
        const auto& s = svd.singularValues();
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s[i] > 1e-12 * s[0]) ++rank;
        if (rank >= n) return Vector::Zero(n);
        Z = svd.matrixU().rightCols(n - rank);
    }
    const Matrix R = Z.transpose() * H * Z;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (R + R.transpose()));
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
        throw NoConvergence("brute_force_direction: reduced metric is not positive definite");
    const Matrix& V = eig.eigenvectors();
    const Vector w = V.transpose() * (Z.transpose() * v);
    const Vector y = -lambda * V * w.cwiseQuotient(eig.eigenvalues());
    return Z * y;
}

}  // namespace

Vector brute_force_direction(const Regularizer& g, const Metric& metric, double lambda,
                             const Vector& v, const Vector& x, const OracleConfig& config) {
    if (const auto* dense = std::get_if<DenseMetric>(&metric)) {
        if (g.kind() == RegularizerKind::Zero || g.kind() == RegularizerKind::AffineEquality)
            return dense_spectral(g, *dense, lambda, v);
    }
    if (g.kind() != RegularizerKind::AffineEquality)
        return coordinate_descent(g, metric, lambda, v, x, config);

    // Lagrangian in the multiplier mu: minimize <v + mu a, d> + ... , then find
    // the mu with a^T d(mu) = 0. a^T d(mu) is nonincreasing in mu.
    const Vector& a = g.a();
    auto residual = [&](double mu, Vector* d_out) {
        Vector d = coordinate_descent(g, metric, lambda, v + mu * a, x, config);
        const double r = a.dot(d);
        if (d_out) *d_out = std::move(d);
        return r;
    };
    double lo = -1.0, hi = 1.0;
    for (int it = 0; residual(lo, nullptr) < 0.0; ++it) {
        lo *= 2.0;
        if (it > 200) throw NoConvergence("brute_force_direction: multiplier bracket");
    }
    for (int it = 0; residual(hi, nullptr) > 0.0; ++it) {
        hi *= 2.0;
        if (it > 200) throw NoConvergence("brute_force_direction: multiplier bracket");
    }
    for (int it = 0; it < config.bisection_steps && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid, nullptr) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    Vector d;
    residual(0.5 * (lo + hi), &d);
    return d;
}

}  // namespace bregman
