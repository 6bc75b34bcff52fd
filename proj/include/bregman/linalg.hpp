#pragma once

#include <cstdint>

#include "bregman/types.hpp"

namespace bregman {

struct PowerMethodResult {
    double estimate = 0.0;  // Rayleigh quotient of A^T A
    Vector vector;          // unit-norm iterate
    int iterations = 0;
    bool converged = false;
};

/// Largest eigenvalue of A^T A by power iteration, stopping when the relative
/// change of the Rayleigh quotient drops to tol. The start vector is drawn from
/// the library generator with the given seed.
PowerMethodResult power_method(const Matrix& A, double tol = 1e-10, int max_iter = 5000,
                               std::uint64_t seed = 0x5eedULL);

/// Same, for a symmetric positive semidefinite matrix S given directly.
PowerMethodResult power_method_symmetric(const Matrix& S, double tol = 1e-10,
                                         int max_iter = 5000, std::uint64_t seed = 0x5eedULL);

}  // namespace bregman
