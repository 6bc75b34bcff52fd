#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "bregman/errors.hpp"
#include "bregman/instance.hpp"
#include "bregman/random.hpp"
#include "bregman/serialize.hpp"

using namespace bregman;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

InstanceSpec spec_for(Family family, int n, int m, std::uint64_t seed = 5) {
    InstanceSpec s = InstanceSpec::defaults(family);
    s.n = n;
    s.m = m;
    s.seed = seed;
    return s;
}

}  // namespace

// Reference outputs computed with an independent SplitMix64 implementation.
TEST(CounterRng, FrozenOutputs) {
    EXPECT_EQ(mix64(0), 0u);
    EXPECT_EQ(mix64(1), 6238072747940578789ull);
    CounterRng rng(42, 0);
    EXPECT_EQ(rng.next_u64(), 10996452266160306281ull);
    EXPECT_EQ(rng.next_u64(), 2958219263312191191ull);
    EXPECT_EQ(rng.next_u64(), 3069497704473277141ull);
    CounterRng u(42, 0);
    EXPECT_EQ(u.uniform(), 0.5961188718302076);
    CounterRng g(7, 3);
    EXPECT_NEAR(g.normal(), -2.478536983672566, 1e-15);
    EXPECT_NEAR(g.normal(), -0.5563549854876751, 1e-15);
}

TEST(CounterRng, StreamsAndRanges) {
    CounterRng a(1, 0), b(1, 1);
    EXPECT_NE(a.next_u64(), b.next_u64());
    CounterRng r(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(r.below(7), 7u);
    }
    const auto idx = r.choose(20, 6);
    ASSERT_EQ(idx.size(), 6u);
    for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_LT(idx[i - 1], idx[i]);
    EXPECT_LT(idx.back(), 20);
}

TEST(CounterRng, NormalMoments) {
    CounterRng r(10);
    const Vector z = r.normal_vector(20000);
    EXPECT_NEAR(z.mean(), 0.0, 0.03);
    EXPECT_NEAR(z.squaredNorm() / z.size(), 1.0, 0.05);
}

TEST(Family, Names) {
    for (Family f : {Family::LpLS, Family::LpLSEq, Family::LpLoss, Family::NonnegKL})
        EXPECT_EQ(parse_family(to_string(f)), f);
    EXPECT_EQ(parse_family("nonnegkl"), Family::NonnegKL);
    EXPECT_THROW(parse_family("lasso"), SpecError);
}

TEST(InstanceSpec, Validation) {
    InstanceSpec s = spec_for(Family::LpLS, 10, 10);
    EXPECT_NO_THROW(s.validate());
    s.p = 1.0;
    EXPECT_THROW(s.validate(), SpecError);
    s = spec_for(Family::LpLS, 0, 10);
    EXPECT_THROW(s.validate(), SpecError);
    s = spec_for(Family::LpLS, 10, 10);
    s.density = 0.0;
    EXPECT_THROW(s.validate(), SpecError);
    s.density = 1.5;
    EXPECT_THROW(s.validate(), SpecError);
    s = spec_for(Family::NonnegKL, 10, 10);
    s.theta1 = -1.0;
    EXPECT_THROW(s.validate(), SpecError);
    EXPECT_DOUBLE_EQ(spec_for(Family::LpLoss, 10, 10).effective_density(), 0.10);
    EXPECT_DOUBLE_EQ(spec_for(Family::LpLS, 10, 10).effective_density(), 0.05);
}

TEST(GenInstance, SparsityOfTruth) {
    for (int n : {20, 100, 500, 501}) {
        const Instance inst = gen_instance(spec_for(Family::LpLS, n, 30));
        const auto nnz = (inst.problem.ground_truth->array() != 0.0).count();
        EXPECT_EQ(nnz, static_cast<long>(std::ceil(0.05 * n))) << n;
    }
    const Instance loss = gen_instance(spec_for(Family::LpLoss, 200, 50));
    EXPECT_EQ((loss.problem.ground_truth->array() != 0.0).count(), 20);
}

TEST(GenInstance, FamilyInvariants) {
    const Instance kl = gen_instance(spec_for(Family::NonnegKL, 40, 60));
    const Matrix& A = kl.problem.f->A();
    EXPECT_GE(A.minCoeff(), 0.0);
    for (Eigen::Index j = 0; j < A.cols(); ++j) EXPECT_NEAR(A.col(j).sum(), 1.0, 1e-12);
    EXPECT_GT(kl.x0.minCoeff(), 0.0);
    EXPECT_GE(kl.problem.ground_truth->minCoeff(), 0.0);
    EXPECT_NEAR(kl.problem.f->value(*kl.problem.ground_truth + Vector::Constant(40, 0.0)), 0.0, 1e-12);

    const Instance eq = gen_instance(spec_for(Family::LpLSEq, 40, 60));
    EXPECT_NEAR(eq.x0.sum(), 1.0, 1e-12);
    EXPECT_EQ(eq.problem.g.kind(), RegularizerKind::AffineEquality);
    EXPECT_TRUE(std::isfinite(eq.problem.psi(eq.x0)));

    const Instance ls = gen_instance(spec_for(Family::LpLS, 40, 60));
    EXPECT_LE((ls.problem.f->A() * *ls.problem.ground_truth - ls.problem.f->b()).norm(), 1e-12);
    EXPECT_FALSE(ls.notes.empty());
}

TEST(GenInstance, DeterministicInSeed) {
    for (Family f : {Family::LpLS, Family::LpLSEq, Family::LpLoss, Family::NonnegKL}) {
        const Instance a = gen_instance(spec_for(f, 30, 40, 77));
        const Instance b = gen_instance(spec_for(f, 30, 40, 77));
        const Instance c = gen_instance(spec_for(f, 30, 40, 78));
        EXPECT_EQ(a.problem.f->A(), b.problem.f->A());
        EXPECT_EQ(a.problem.f->b(), b.problem.f->b());
        EXPECT_EQ(a.x0, b.x0);
        EXPECT_EQ(*a.problem.ground_truth, *b.problem.ground_truth);
        EXPECT_NE(a.problem.f->A(), c.problem.f->A());
    }
}

TEST(ProjectOntoHyperplane, Examples) {
    const Vector y = project_onto_hyperplane(vec({0, 0}), vec({1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(y[0], 0.5);
    EXPECT_DOUBLE_EQ(y[1], 0.5);
    EXPECT_EQ(project_onto_hyperplane(vec({0.25, 0.75}), vec({1, 1}), 1.0), vec({0.25, 0.75}));
    EXPECT_THROW(project_onto_hyperplane(vec({1, 2}), vec({0, 0}), 1.0), DegenerateConstraint);
}

TEST(ProjectOntoHyperplane, MatchesKktSolve) {
    CounterRng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector x = rng.normal_vector(5), a = rng.normal_vector(5);
        const double gamma = rng.normal();
        // min ||y - x||^2 s.t. a^T y = gamma as a dense KKT system.
        Matrix K = Matrix::Zero(6, 6);
        K.topLeftCorner(5, 5) = Matrix::Identity(5, 5);
        K.topRightCorner(5, 1) = a;
        K.bottomLeftCorner(1, 5) = a.transpose();
        Vector rhs(6);
        rhs << x, gamma;
        const Vector ref = K.fullPivLu().solve(rhs).head(5);
        const Vector y = project_onto_hyperplane(x, a, gamma);
        EXPECT_LE((y - ref).lpNorm<Eigen::Infinity>(), 1e-12);
        EXPECT_NEAR(a.dot(y), gamma, 1e-12 * (1 + a.norm() * y.norm()));
    }
}

TEST(SpectralInitialization, TopEigenvectorWithDocumentedScale) {
    CounterRng rng(52);
    const Matrix A = rng.normal_matrix(60, 8);
    const Vector b = A * rng.normal_vector(8);
    const Vector x0 = spectral_initialization(A, b);
    const Matrix S = A.transpose() * b.array().square().matrix().asDiagonal() * A / 60.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
    const Vector v = eig.eigenvectors().col(7);
    const double scale = std::sqrt(8.0 * b.squaredNorm() / A.squaredNorm());
    EXPECT_NEAR(x0.norm(), scale, 1e-10 * scale);
    EXPECT_NEAR(std::abs(x0.normalized().dot(v)), 1.0, 1e-8);
    EXPECT_GE((A * x0).dot(b), 0.0);
}

TEST(Serialize, FormatDouble) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Serialize, InstanceRoundTrip) {
    for (Family f : {Family::LpLS, Family::LpLSEq, Family::LpLoss, Family::NonnegKL}) {
        InstanceSpec s = spec_for(f, 12, 17, 99);
        s.density = 0.25;
        const Instance a = gen_instance(s);
        std::stringstream buf;
        write_instance(buf, a);
        const Instance b = read_instance(buf);
        EXPECT_EQ(b.spec.family, f);
        EXPECT_EQ(b.spec.n, 12);
        EXPECT_EQ(b.spec.m, 17);
        EXPECT_EQ(b.spec.seed, 99u);
        EXPECT_EQ(b.spec.p, s.p);
        EXPECT_EQ(b.spec.theta_p, s.theta_p);
        EXPECT_EQ(b.spec.density, s.density);
        EXPECT_EQ(b.problem.f->A(), a.problem.f->A());
        EXPECT_EQ(b.problem.f->b(), a.problem.f->b());
        EXPECT_EQ(b.x0, a.x0);
        EXPECT_EQ(*b.problem.ground_truth, *a.problem.ground_truth);
        EXPECT_EQ(b.notes, a.notes);
        EXPECT_EQ(b.problem.psi(b.x0), a.problem.psi(a.x0));
    }
}

TEST(Serialize, FileRoundTripAndErrors) {
    const auto path = (std::filesystem::temp_directory_path() / "bregman_kit_instance_test.bin").string();
    const Instance a = gen_instance(spec_for(Family::LpLS, 6, 9));
    write_instance(path, a);
    EXPECT_EQ(read_instance(path).problem.f->A(), a.problem.f->A());
    std::filesystem::remove(path);
    EXPECT_THROW(read_instance(path), IoError);

    std::stringstream bad("NOT AN INSTANCE\n");
    EXPECT_THROW(read_instance(bad), IoError);
    std::stringstream full;
    write_instance(full, a);
    const std::string bytes = full.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW(read_instance(truncated), IoError);
}
