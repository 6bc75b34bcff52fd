#include <gtest/gtest.h>

#include <cmath>

#include "bregman/errors.hpp"
#include "bregman/instance.hpp"
#include "bregman/random.hpp"
#include "bregman/solvers.hpp"

using namespace bregman;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

std::shared_ptr<const SmoothObjective> half_sq_dist(const Vector& c) {
    // 1/2 ||x - c||^2
    const auto n = c.size();
    return std::make_shared<SmoothObjective>(SmoothObjective::lp_least_squares(Matrix::Identity(n, n), c, 0.0, 2.0));
}

Instance small(Family family, std::uint64_t seed, int n = 30, int m = 50) {
    InstanceSpec s = InstanceSpec::defaults(family);
    s.n = n;
    s.m = m;
    s.seed = seed;
    if (family == Family::NonnegKL) s.theta1 = 0.05;
    return gen_instance(s);
}

void expect_same_trace(const IterateTrace& a, const IterateTrace& b) {
    ASSERT_EQ(a.records.size(), b.records.size());
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.initial.psi, b.initial.psi);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].psi, b.records[i].psi) << i;
        EXPECT_EQ(a.records[i].step_norm, b.records[i].step_norm) << i;
        EXPECT_EQ(a.records[i].direction_norm, b.records[i].direction_norm) << i;
        EXPECT_EQ(a.records[i].t, b.records[i].t) << i;
        EXPECT_EQ(a.records[i].backtracks, b.records[i].backtracks) << i;
        EXPECT_EQ(a.records[i].accuracy, b.records[i].accuracy) << i;
    }
    EXPECT_EQ(a.final_x, b.final_x);
}

}  // namespace

TEST(SolverConfig, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    for (auto mutate : std::vector<std::function<void(SolverConfig&)>>{
             [](SolverConfig& s) { s.alpha = 1.0; }, [](SolverConfig& s) { s.eta = 0.0; },
             [](SolverConfig& s) { s.kappa = 0.0; }, [](SolverConfig& s) { s.lambda = -1.0; },
             [](SolverConfig& s) { s.max_iter = -1; }, [](SolverConfig& s) { s.t_min = 1.0; },
             [](SolverConfig& s) { s.tol = -1.0; }}) {
        SolverConfig bad;
        mutate(bad);
        EXPECT_THROW(bad.validate(), SpecError);
    }
}

TEST(LineSearch, ZeroDirectionTakesFullStep) {
    const CompositeProblem p(half_sq_dist(vec({1, 2})), Regularizer::zero(), Kernel::squared_euclidean());
    DirectionResult dir;
    dir.d = Vector::Zero(2);
    const Vector x = vec({0, 0});
    const LineSearchResult r = line_search(p, x, dir, p.psi(x), SolverConfig{});
    EXPECT_EQ(r.t, 1.0);
    EXPECT_EQ(r.backtracks, 0);
    EXPECT_FALSE(r.floor_hit);
}

TEST(LineSearch, ScalarReference) {
    // f = x^2 / 2 at x = 1, d = -1, rho = -1, alpha = 0.99: the first accepted
    // eta^j is found by a scalar loop to be j = 38.
    const CompositeProblem p(half_sq_dist(vec({0})), Regularizer::zero(), Kernel::squared_euclidean());
    DirectionResult dir;
    dir.d = vec({-1});
    dir.rho = -1.0;
    const Vector x = vec({1});
    const LineSearchResult r = line_search(p, x, dir, p.psi(x), SolverConfig{});
    EXPECT_EQ(r.backtracks, 38);
    EXPECT_NEAR(r.t, 0.01824800363140075, 1e-16);
    EXPECT_DOUBLE_EQ(r.psi_next, p.psi(x + r.t * dir.d));
    EXPECT_LE(r.psi_next, p.psi(x) + 0.99 * r.t * dir.rho);
}

TEST(LineSearch, GeometricScheduleAndFloor) {
    const CompositeProblem p(half_sq_dist(vec({0})), Regularizer::zero(), Kernel::squared_euclidean());
    DirectionResult dir;
    dir.d = vec({-1});
    dir.rho = -1.0;
    const Vector x = vec({1});
    for (double eta : {0.5, 0.9}) {
        SolverConfig c;
        c.eta = eta;
        const LineSearchResult r = line_search(p, x, dir, p.psi(x), c);
        EXPECT_NEAR(r.t, std::pow(eta, r.backtracks), 1e-15);
        // Previous candidate eta^(j-1) is rejected.
        const double prev = std::pow(eta, r.backtracks - 1);
        EXPECT_GT(p.psi(x + prev * dir.d), p.psi(x) + 0.99 * prev * dir.rho);
    }
    SolverConfig c;
    c.t_min = 0.5;
    EXPECT_TRUE(line_search(p, x, dir, p.psi(x), c).floor_hit);
}

TEST(Abpg, ExactQuadraticModel) {
    const Vector c = vec({1, -2, 3});
    const CompositeProblem p(half_sq_dist(c), Regularizer::zero(), Kernel::squared_euclidean());
    SolverConfig config;
    config.lambda = 1.0;
    config.alpha = 0.5;  // with alpha = 0.5 the full step meets the decrease test with equality
    const IterateTrace t = abpg_solve(p, config, Vector::Zero(3));
    ASSERT_GE(t.iterations(), 1);
    EXPECT_EQ(t.records[0].t, 1.0);
    EXPECT_EQ(t.records[0].psi, 0.0);
    EXPECT_EQ(t.status, RunStatus::Converged);
    EXPECT_EQ(t.final_x, c);
}

TEST(Abpg, MonotoneWithDecreaseBounds) {
    for (Family family : {Family::LpLS, Family::LpLSEq, Family::LpLoss, Family::NonnegKL}) {
        const Instance inst = small(family, 3);
        SolverConfig config;
        config.max_iter = 200;
        const IterateTrace t = abpg_solve(inst.problem, config, inst.x0);
        EXPECT_NE(t.status, RunStatus::DomainFailure) << to_string(family);
        double prev = t.initial.psi;
        for (const auto& r : t.records) {
            EXPECT_LE(r.psi, prev) << to_string(family) << " k=" << r.k;
            EXPECT_LE(r.model_decrease, -r.metric_quad / (2 * r.lambda) + 1e-10);
            EXPECT_GE(prev - r.psi, -config.alpha * r.t * r.model_decrease - 1e-10 * (1 + std::abs(prev)));
            EXPECT_GE(prev - r.psi, config.alpha * t.kernel_sigma * r.t / (2 * r.lambda) * r.direction_norm *
                                            r.direction_norm -
                                        1e-8);
            prev = r.psi;
        }
    }
}

TEST(Abpg, StatusMatchesLastStep) {
    const Instance inst = small(Family::LpLS, 4);
    for (int max_iter : {5, 1000}) {
        SolverConfig config;
        config.max_iter = max_iter;
        const IterateTrace t = abpg_solve(inst.problem, config, inst.x0);
        EXPECT_EQ(t.status == RunStatus::Converged, t.records.back().step_norm <= config.tol);
        if (max_iter == 5) EXPECT_EQ(t.status, RunStatus::MaxIterations);
    }
}

TEST(Abpg, FinalResidualBelowInitial) {
    for (Family family : {Family::LpLS, Family::LpLSEq, Family::LpLoss, Family::NonnegKL}) {
        const Instance inst = small(family, 5);
        const IterateTrace t = abpg_solve(inst.problem, SolverConfig{}, inst.x0);
        const double lambda = t.records.front().lambda;
        EXPECT_LE(stationarity_residual(inst.problem, t.final_x, lambda),
                  stationarity_residual(inst.problem, inst.x0, lambda))
            << to_string(family);
        if (t.status == RunStatus::Converged)
            EXPECT_LE(stationarity_residual(inst.problem, t.final_x, lambda), 10 * 1e-6 / t.records.back().t)
                << to_string(family);
    }
}

TEST(Abpg, EqualityConstraintHeldAtEveryIterate) {
    const Instance inst = small(Family::LpLSEq, 6);
    const Regularizer& g = inst.problem.g;
    for (Algorithm a : {Algorithm::ABPG, Algorithm::PG, Algorithm::PGL, Algorithm::RN}) {
        SolverConfig config;
        config.max_iter = 100;
        double worst = 0.0;
        int calls = 0;
        config.observer = [&](int, const Vector& x) {
            ++calls;
            worst = std::max(worst, std::abs(g.a().dot(x) - g.gamma()));
        };
        const IterateTrace t = solve(a, inst.problem, config, inst.x0);
        EXPECT_EQ(calls, t.iterations() + 1);
        EXPECT_LE(worst, 1e-8) << to_string(a);
    }
}

TEST(Abpg, DomainFailureOnBadStart) {
    const Instance inst = small(Family::NonnegKL, 7);
    Vector x0 = inst.x0;
    x0[0] = -1.0;
    const IterateTrace t = abpg_solve(inst.problem, SolverConfig{}, x0);
    EXPECT_EQ(t.status, RunStatus::DomainFailure);
    EXPECT_EQ(t.iterations(), 0);
    EXPECT_THROW(abpg_solve(inst.problem, SolverConfig{}, Vector::Ones(3)), DomainError);
}

TEST(Abpg, Deterministic) {
    const Instance inst = small(Family::LpLS, 8);
    expect_same_trace(abpg_solve(inst.problem, SolverConfig{}, inst.x0),
                      abpg_solve(inst.problem, SolverConfig{}, inst.x0));
}

TEST(Pg, GradientStepWithoutRegularizer) {
    CounterRng rng(41);
    auto f = std::make_shared<SmoothObjective>(
        SmoothObjective::lp_least_squares(rng.normal_matrix(8, 4), rng.normal_vector(8), 0.05, 3.0));
    const CompositeProblem p(f, Regularizer::zero(), Kernel::sum({Kernel::squared_euclidean(), Kernel::p_power(3.0)}));
    const Vector x0 = rng.normal_vector(4);
    SolverConfig config;
    config.max_iter = 1;
    const IterateTrace t = pg_solve(p, config, x0);
    const double L = euclidean_step_constant(*f);
    EXPECT_LE((t.final_x - (x0 - f->gradient(x0) / L)).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(Pg, IstaStepWithL1) {
    CounterRng rng(42);
    auto f = std::make_shared<SmoothObjective>(
        SmoothObjective::lp_least_squares(rng.normal_matrix(8, 4), rng.normal_vector(8), 0.05, 3.0));
    const double theta = 0.3;
    const CompositeProblem p(f, Regularizer::l1(theta), Kernel::sum({Kernel::squared_euclidean(), Kernel::p_power(3.0)}));
    const Vector x0 = rng.normal_vector(4);
    SolverConfig config;
    config.max_iter = 1;
    const IterateTrace t = pg_solve(p, config, x0);
    const double L = euclidean_step_constant(*f);
    const Vector z = x0 - f->gradient(x0) / L;
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double ref = std::abs(z[i]) <= theta / L ? 0.0 : z[i] - std::copysign(theta / L, z[i]);
        EXPECT_NEAR(t.final_x[i], ref, 1e-14);
    }
}

TEST(Pgl, NoBacktracksWhenInitialEstimateIsGlobal) {
    CounterRng rng(43);
    auto f = std::make_shared<SmoothObjective>(
        SmoothObjective::lp_least_squares(rng.normal_matrix(10, 5), rng.normal_vector(10), 0.0, 2.0));
    const CompositeProblem p(f, Regularizer::zero(), Kernel::squared_euclidean());
    const IterateTrace t = pgl_solve(p, SolverConfig{}, rng.normal_vector(5));
    for (const auto& r : t.records) EXPECT_EQ(r.backtracks, 0);
}

TEST(Pgl, BacktracksOnSmallPInstance) {
    const Instance inst = small(Family::LpLS, 9);
    const IterateTrace t = pgl_solve(inst.problem, SolverConfig{}, inst.x0);
    int total = 0;
    for (const auto& r : t.records) total += r.backtracks;
    EXPECT_GT(total, 0);
    // Estimates only grow, so the reported relative step never increases.
    for (std::size_t i = 1; i < t.records.size(); ++i) EXPECT_LE(t.records[i].t, t.records[i - 1].t);
}

TEST(Rn, NewtonStepOnQuadratic) {
    CounterRng rng(44);
    const Matrix A = rng.normal_matrix(8, 4);
    auto f = std::make_shared<SmoothObjective>(SmoothObjective::lp_least_squares(A, Vector::Zero(8), 0.0, 2.0));
    const CompositeProblem p(f, Regularizer::zero(), Kernel::squared_euclidean());
    SolverConfig config;
    config.kappa = 1e-12;
    config.lambda = 1.0;
    const IterateTrace t = rn_solve(p, config, rng.normal_vector(4));
    EXPECT_LE(t.records.front().psi, 1e-20);
    EXPECT_LE(t.iterations(), 2);
}

TEST(Rn, LineSearchVariantEqualsAbpgWithRidgeKernel) {
    for (Family family : {Family::LpLS, Family::LpLSEq, Family::LpLoss}) {
        const Instance inst = small(family, 10);
        SolverConfig config;
        config.rn_line_search = true;
        config.max_iter = 300;
        const CompositeProblem ridge(inst.problem.f, inst.problem.g,
                                     Kernel::f_plus_ridge(inst.problem.f, config.kappa), inst.problem.ground_truth);
        expect_same_trace(rn_solve(inst.problem, config, inst.x0), abpg_solve(ridge, config, inst.x0));
    }
}

TEST(Rn, FixedStepTakesUnitSteps) {
    const Instance inst = small(Family::LpLS, 11);
    SolverConfig config;
    config.max_iter = 20;
    const IterateTrace t = rn_solve(inst.problem, config, inst.x0);
    for (const auto& r : t.records) {
        EXPECT_EQ(r.t, 1.0);
        EXPECT_EQ(r.backtracks, 0);
    }
}

TEST(Rn, LpLossZeroResidualIsHandled) {
    // ABPG on the l_p loss reaches exact zero residuals; those rows are frozen
    // instead of ending the run.
    const Instance inst = small(Family::LpLoss, 12, 40, 120);
    const IterateTrace t = abpg_solve(inst.problem, SolverConfig{}, inst.x0);
    EXPECT_EQ(t.status, RunStatus::Converged);
}

TEST(Bpg, FixedPointConvergesImmediately) {
    // With A = I-like columns and b = A x, grad f(x) = 0; theta1 = 0 makes x a fixed point.
    Matrix A(2, 2);
    A << 0.5, 0.25, 0.5, 0.75;
    const Vector x = vec({1, 2});
    auto f = std::make_shared<SmoothObjective>(SmoothObjective::kl_linear(A, A * x));
    const CompositeProblem p(f, Regularizer::l1_plus_nonneg(0.0), Kernel::shannon_entropy());
    const IterateTrace t = bpg_solve(p, SolverConfig{}, x);
    EXPECT_EQ(t.status, RunStatus::Converged);
    EXPECT_EQ(t.iterations(), 1);
}

TEST(Bpg, IteratesStayPositive) {
    for (std::uint64_t seed : {13, 14, 15}) {
        const Instance inst = small(Family::NonnegKL, seed);
        SolverConfig config;
        config.max_iter = 300;
        double lo = 1.0;
        config.observer = [&](int, const Vector& x) { lo = std::min(lo, x.minCoeff()); };
        bpg_solve(inst.problem, config, inst.x0);
        EXPECT_GT(lo, 0.0);
        lo = 1.0;
        abpg_solve(inst.problem, config, inst.x0);
        EXPECT_GT(lo, 0.0);
    }
}

TEST(Bpg, RejectsOtherFamilies) {
    const Instance inst = small(Family::LpLS, 16);
    EXPECT_THROW(bpg_solve(inst.problem, SolverConfig{}, inst.x0), UnsupportedPair);
}

TEST(Stationarity, ZeroAtQuadraticMinimum) {
    const Vector c = vec({1, 2});
    const CompositeProblem p(half_sq_dist(c), Regularizer::zero(), Kernel::squared_euclidean());
    EXPECT_EQ(stationarity_residual(p, c, 1.0), 0.0);
    const Vector x = vec({0, 0});
    EXPECT_DOUBLE_EQ(stationarity_residual(p, x, 0.5), 0.5 * c.norm());
}

TEST(Algorithms, NamesRoundTrip) {
    for (Algorithm a : {Algorithm::ABPG, Algorithm::PG, Algorithm::PGL, Algorithm::RN, Algorithm::BPG})
        EXPECT_EQ(parse_algorithm(to_string(a)), a);
    EXPECT_EQ(parse_algorithm("abpg"), Algorithm::ABPG);
    EXPECT_THROW(parse_algorithm("newton"), SpecError);
    EXPECT_EQ(to_string(RunStatus::LineSearchFloor), "LineSearchFloor");
}
