#include "bregman/linalg.hpp"

#include <cmath>

#include "bregman/errors.hpp"
#include "bregman/random.hpp"

namespace bregman {

namespace {

template <class Apply>
PowerMethodResult iterate(Eigen::Index n, Apply&& apply, double tol, int max_iter,
                          std::uint64_t seed) {
    CounterRng rng(seed, 0x706f776572ULL);
    PowerMethodResult out;
    Vector x = rng.normal_vector(n);
    double norm = x.norm();
    if (norm == 0.0) {
        x.setOnes();
        norm = x.norm();
    }
    x /= norm;

    double previous = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vector y = apply(x);
        const double rayleigh = x.dot(y);
        const double ynorm = y.norm();
        out.iterations = it;
        out.estimate = rayleigh;
        if (ynorm == 0.0) {
            out.vector = x;
            out.converged = true;
            return out;
        }
        x = y / ynorm;
        if (it > 1 && std::abs(rayleigh - previous) <= tol * std::abs(rayleigh)) {
            out.vector = x;
            out.converged = true;
            return out;
        }
        previous = rayleigh;
    }
    out.vector = x;
    return out;
}

}  // namespace

PowerMethodResult power_method(const Matrix& A, double tol, int max_iter, std::uint64_t seed) {
    if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0)
        throw DomainError("power_method: matrix must be nonzero");
    return iterate(
        A.cols(), [&](const Vector& x) -> Vector { return A.transpose() * (A * x); }, tol,
        max_iter, seed);
}

PowerMethodResult power_method_symmetric(const Matrix& S, double tol, int max_iter,
                                         std::uint64_t seed) {
    if (S.rows() != S.cols() || S.size() == 0)
        throw DomainError("power_method_symmetric: matrix must be square and nonempty");
    return iterate(
        S.cols(), [&](const Vector& x) -> Vector { return S * x; }, tol, max_iter, seed);
}

}  // namespace bregman
