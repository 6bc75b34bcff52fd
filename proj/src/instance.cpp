#include "bregman/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "bregman/errors.hpp"
#include "bregman/linalg.hpp"
#include "bregman/random.hpp"

namespace bregman {

namespace {

enum Stream : std::uint64_t { kMatrix = 1, kSupport = 2, kValues = 3, kStart = 4 };

Vector sparse_truth(const InstanceSpec& spec, bool nonnegative) {
    const auto k = static_cast<Eigen::Index>(std::ceil(spec.effective_density() * spec.n - 1e-9));
    CounterRng support(spec.seed, kSupport);
    CounterRng values(spec.seed, kValues);
    Vector x = Vector::Zero(spec.n);
    for (Eigen::Index i : support.choose(spec.n, k)) {
        double z = values.normal();
        if (nonnegative) {
            z = std::abs(z);
            // Keep the support exact: a zero draw would drop a nonzero.
            while (z == 0.0) z = std::abs(values.normal());
        }
        x[i] = z;
    }
    return x;
}

}  // namespace

std::string to_string(Family family) {
    switch (family) {
        case Family::LpLS: return "LpLS";
        case Family::LpLSEq: return "LpLSEq";
        case Family::LpLoss: return "LpLoss";
        case Family::NonnegKL: return "NonnegKL";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "lpls") return Family::LpLS;
    if (lower == "lplseq") return Family::LpLSEq;
    if (lower == "lploss") return Family::LpLoss;
    if (lower == "nonnegkl") return Family::NonnegKL;
    throw SpecError("unknown family '" + name + "'");
}

double InstanceSpec::effective_density() const {
    if (density) return *density;
    return family == Family::LpLoss ? 0.10 : 0.05;
}

void InstanceSpec::validate() const {
    if (n < 1 || m < 1) throw SpecError("n and m must be positive");
    const double rho = effective_density();
    if (!(rho > 0.0 && rho <= 1.0)) throw SpecError("density must lie in (0, 1]");
    if (family != Family::NonnegKL && !(p > 1.0)) throw SpecError("p must exceed 1");
    if (!(theta_p >= 0.0) || !(theta1 >= 0.0)) throw SpecError("theta_p and theta1 must be >= 0");
    if (family == Family::LpLSEq && theta1 > 0.0)
        throw SpecError("LpLSEq does not combine theta1 with the equality constraint");
    if (family == Family::LpLoss && theta1 > 0.0)
        throw SpecError("LpLoss has no closed-form direction with theta1 > 0");
}

InstanceSpec InstanceSpec::defaults(Family family) {
    InstanceSpec s;
    s.family = family;
    switch (family) {
        case Family::LpLS:
        case Family::LpLSEq:
            s.n = 500;
            s.m = 800;
            s.p = 1.1;
            s.theta_p = 0.05;
            s.theta1 = 0.0;
            break;
        case Family::LpLoss:
            s.n = 200;
            s.m = 500;
            s.p = 1.1;
            s.theta_p = 0.0;
            s.theta1 = 0.0;
            break;
        case Family::NonnegKL:
            s.n = 200;
            s.m = 500;
            s.theta_p = 0.0;
            s.theta1 = 0.05;
            break;
    }
    return s;
}

CompositeProblem make_problem(const InstanceSpec& spec, Matrix A, Vector b, Vector x_star) {
    switch (spec.family) {
        case Family::LpLS:
        case Family::LpLSEq: {
            auto f = std::make_shared<const SmoothObjective>(
                SmoothObjective::lp_least_squares(std::move(A), std::move(b), spec.theta_p, spec.p));
            Regularizer g = spec.family == Family::LpLSEq
                                ? Regularizer::affine_equality(Vector::Ones(spec.n), 1.0)
                                : (spec.theta1 > 0.0 ? Regularizer::l1(spec.theta1)
                                                     : Regularizer::zero());
            Kernel phi = Kernel::sum({Kernel::squared_euclidean(), Kernel::p_power(spec.p)});
            return CompositeProblem(std::move(f), std::move(g), std::move(phi), std::move(x_star));
        }
        case Family::LpLoss: {
            auto f = std::make_shared<const SmoothObjective>(
                SmoothObjective::lp_loss(std::move(A), std::move(b), spec.p));
            Kernel phi = Kernel::f_plus_ridge(f, 1.0);
            return CompositeProblem(f, Regularizer::zero(), std::move(phi), std::move(x_star));
        }
        case Family::NonnegKL: {
            auto f = std::make_shared<const SmoothObjective>(
                SmoothObjective::kl_linear(std::move(A), std::move(b)));
            Kernel phi = Kernel::sum({Kernel::shannon_entropy(), Kernel::squared_euclidean()});
            return CompositeProblem(std::move(f), Regularizer::l1_plus_nonneg(spec.theta1),
                                    std::move(phi), std::move(x_star));
        }
    }
    throw SpecError("unknown family");
}

Instance gen_instance(const InstanceSpec& spec) {
    spec.validate();
    CounterRng matrix_rng(spec.seed, kMatrix);
    CounterRng start_rng(spec.seed, kStart);
    std::vector<std::string> notes;
    // Gaussian designs use entries N(0, 1/m) so that lambda_max(A^T A) stays O(1)
    // and theta_p is not swamped; NonnegKL renormalizes columns anyway.
    Matrix A = matrix_rng.normal_matrix(spec.m, spec.n);
    if (spec.family != Family::NonnegKL) A /= std::sqrt(static_cast<double>(spec.m));
    Vector x_star;
    Vector x0;

    switch (spec.family) {
        case Family::LpLS:
        case Family::LpLSEq:
            x_star = sparse_truth(spec, false);
            x0 = start_rng.normal_vector(spec.n);
            notes.emplace_back("A ~ N(0, 1/m) i.i.d.; x0 ~ N(0, I)");
            if (spec.family == Family::LpLSEq) {
                x0 = project_onto_hyperplane(x0, Vector::Ones(spec.n), 1.0);
                notes.emplace_back("x0 projected onto {x : 1^T x = 1}");
            }
            break;
        case Family::LpLoss:
            x_star = sparse_truth(spec, false);
            notes.emplace_back("A ~ N(0, 1/m) i.i.d.");
            break;
        case Family::NonnegKL:
            A = A.cwiseAbs();
            for (Eigen::Index j = 0; j < A.cols(); ++j) A.col(j) /= A.col(j).sum();
            x_star = sparse_truth(spec, true);
            x0 = start_rng.normal_vector(spec.n).cwiseAbs();
            for (Eigen::Index i = 0; i < x0.size(); ++i)
                if (x0[i] == 0.0) x0[i] = 1.0;
            notes.emplace_back("A = |N(0,1)| with unit column sums; x* = |N(0,1)| on its support");
            notes.emplace_back("x0 = |N(0, I)|");
            break;
    }
    Vector b = A * x_star;
    if (spec.family == Family::LpLoss) {
        x0 = spectral_initialization(A, b);
        notes.emplace_back("x0 = sqrt(n sum b_i^2 / sum ||a_i||^2) * top eigenvector of "
                           "(1/m) sum b_i^2 a_i a_i^T, sign with <A v, b> >= 0");
    }
    CompositeProblem problem = make_problem(spec, std::move(A), std::move(b), x_star);
    return Instance{spec, std::move(problem), std::move(x0), std::move(notes)};
}

Vector project_onto_hyperplane(const Vector& x, const Vector& a, double gamma) {
    if (x.size() != a.size()) throw DomainError("project_onto_hyperplane: dimension mismatch");
    const double aa = a.squaredNorm();
    if (aa == 0.0) throw DegenerateConstraint("project_onto_hyperplane: a is zero");
    return x - ((a.dot(x) - gamma) / aa) * a;
}

Vector spectral_initialization(const Matrix& A, const Vector& b) {
    const double m = static_cast<double>(A.rows());
    const double n = static_cast<double>(A.cols());
    const Matrix S = A.transpose() * (b.array().square().matrix().asDiagonal() * A) / m;
    const PowerMethodResult top = power_method_symmetric(S, 1e-12, 5000);
    Vector v = top.vector.normalized();
    if ((A * v).dot(b) < 0.0) v = -v;
    const double scale = std::sqrt(n * b.squaredNorm() / A.squaredNorm());
    return scale * v;
}

}  // namespace bregman
