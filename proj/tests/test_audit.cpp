#include <gtest/gtest.h>

#include <cmath>

#include "bregman/audit.hpp"

using namespace bregman;

namespace {

InstanceSpec small(Family family) {
    InstanceSpec s = InstanceSpec::defaults(family);
    s.n = 16;
    s.m = 24;
    s.seed = 11;
    return s;
}

const AuditCheck* find(const AuditReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace

TEST(FdHelpers, QuadraticIsExactUpToRounding) {
    const Vector x = Vector::LinSpaced(4, -1.0, 2.0);
    auto value = [](const Vector& y) { return 0.5 * y.squaredNorm() + y.sum(); };
    const Vector grad = x + Vector::Ones(4);
    EXPECT_LE(fd_gradient_error(value, grad, x, {0, 1, 2, 3}), 1e-8);
    EXPECT_GT(fd_gradient_error(value, grad + Vector::Constant(4, 1e-3), x, {0, 1, 2, 3}), 3e-4);  // 1e-3 / ||g||_inf

    auto gradient = [](const Vector& y) { return Vector(y.array().cube()); };
    const Vector u = Vector::Ones(4);
    const Vector hu = 3.0 * x.array().square().matrix();
    EXPECT_LE(fd_hessian_error(gradient, hu, x, u), 1e-6);
    EXPECT_GT(fd_hessian_error(gradient, 2.0 * hu, x, u), 1e-2);
}

TEST(RunAudit, PassesOnEveryFamily) {
    for (Family f : {Family::LpLS, Family::LpLSEq, Family::LpLoss, Family::NonnegKL}) {
        const AuditReport r = run_audit(small(f));
        EXPECT_TRUE(r.passed()) << to_string(f) << '\n' << r.text();
        for (const char* name : {"instance", "gradient_f", "hessian_f", "gradient_phi", "hessian_phi",
                                 "lsmad", "oracle", "descent"})
            EXPECT_NE(find(r, name), nullptr) << name;
    }
}

TEST(RunAudit, FaultHooksFailTheirChecks) {
    AuditOptions corrupt;
    corrupt.gradient_corruption = 1e-3;
    const AuditReport a = run_audit(small(Family::LpLS), corrupt);
    EXPECT_FALSE(a.passed());
    EXPECT_FALSE(find(a, "gradient_f")->passed);
    EXPECT_TRUE(find(a, "hessian_f")->passed);

    AuditOptions loose;
    loose.lsmad_scale = 0.1;
    const AuditReport b = run_audit(small(Family::LpLS), loose);
    EXPECT_FALSE(find(b, "lsmad")->passed);
    EXPECT_TRUE(find(b, "gradient_f")->passed);
}

TEST(AuditPoints, InsideDerivativeDomain) {
    const Instance kl = gen_instance(small(Family::NonnegKL));
    for (const auto& x : audit_points(kl, 10, 1)) EXPECT_GT(x.minCoeff(), 0.0);
    const Instance ls = gen_instance(small(Family::LpLS));
    const auto pts = audit_points(ls, 10, 1);
    ASSERT_EQ(pts.size(), 10u);
    for (const auto& x : pts) EXPECT_GT(x.cwiseAbs().minCoeff(), 0.0);
    EXPECT_EQ(audit_points(ls, 10, 1)[3], pts[3]);
}

TEST(AuditReport, TextFormat) {
    AuditReport r;
    r.checks = {{"gradient_f", true, 1e-9, "limit 1e-06"}, {"lsmad", false, -0.5, ""}};
    EXPECT_FALSE(r.passed());
    const std::string text = r.text();
    EXPECT_EQ(text.substr(0, text.find('\n')), "PASS gradient_f worst=1.0000000000000001e-09 limit 1e-06");
    EXPECT_NE(text.find("FAIL lsmad worst=-0.5\n"), std::string::npos);
}
