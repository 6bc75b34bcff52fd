#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bregman/objectives.hpp"

namespace bregman {

enum class Family {
    LpLS,      // l_p regularized least squares, g = 0 (or theta1 ||x||_1)
    LpLSEq,    // same with the constraint 1^T x = 1
    LpLoss,    // (1/p) ||Ax - b||_p^p
    NonnegKL,  // D_KL(Ax, b) + theta1 ||x||_1 on x >= 0
};

std::string to_string(Family family);
/// Case-insensitive; throws SpecError.
Family parse_family(const std::string& name);

struct InstanceSpec {
    Family family = Family::LpLS;
    int n = 500;
    int m = 800;
    double p = 1.1;
    double theta_p = 0.05;
    double theta1 = 0.0;
    std::optional<double> density;  // nonzero fraction of x*
    std::uint64_t seed = 1;

    /// 0.10 for LpLoss, 0.05 otherwise.
    double effective_density() const;
    /// Throws SpecError.
    void validate() const;
    /// Default experiment sizes and parameters for a family.
    static InstanceSpec defaults(Family family);
};

struct Instance {
    InstanceSpec spec;
    CompositeProblem problem;
    Vector x0;
    /// Free-form generation notes (assumed distributions, scalings).
    std::vector<std::string> notes;
};

/// Deterministic in spec.seed. Draw order: A (row-major), support of x*,
/// values of x*, then x0; each from its own generator stream.
Instance gen_instance(const InstanceSpec& spec);

/// Builds the composite problem for a family from raw data.
CompositeProblem make_problem(const InstanceSpec& spec, Matrix A, Vector b, Vector x_star);

/// Euclidean projection onto {y : a^T y = gamma}. Throws DegenerateConstraint.
Vector project_onto_hyperplane(const Vector& x, const Vector& a, double gamma);

/// Leading-eigenvector start for the l_p loss: s * v, where v is the top unit
/// eigenvector of (1/m) sum b_i^2 a_i a_i^T (sign chosen so <Av, b> >= 0) and
/// s = sqrt(n * sum b_i^2 / sum ||a_i||^2).
Vector spectral_initialization(const Matrix& A, const Vector& b);

}  // namespace bregman
