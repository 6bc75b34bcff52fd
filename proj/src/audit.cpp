#include "bregman/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bregman/directions.hpp"
#include "bregman/errors.hpp"
#include "bregman/oracle.hpp"
#include "bregman/random.hpp"
#include "bregman/serialize.hpp"
#include "bregman/solvers.hpp"

namespace bregman {

namespace {

constexpr std::uint64_t kAuditStream = 0xa0d17;
constexpr int kCoordsPerPoint = 8;
constexpr double kOracleTol = 1e-6;
constexpr double kDescentSlack = -1e-8;

AuditCheck make_check(std::string name, double worst, bool passed, std::string detail = {}) {
    return AuditCheck{std::move(name), passed, worst, std::move(detail)};
}

std::vector<Eigen::Index> pick_coords(CounterRng& rng, Eigen::Index n) {
    const Eigen::Index k = std::min<Eigen::Index>(n, kCoordsPerPoint);
    return rng.choose(n, k);
}

AuditCheck check_instance(const Instance& inst) {
    const InstanceSpec& s = inst.spec;
    const CompositeProblem& pr = inst.problem;
    double worst = 0.0;
    std::vector<std::string> failures;

    const Vector& xs = *pr.ground_truth;
    const auto nnz = (xs.array() != 0.0).count();
    const auto want = static_cast<long>(std::ceil(s.effective_density() * s.n - 1e-9));
    if (nnz != want) failures.push_back("x* has " + std::to_string(nnz) + " nonzeros, want " + std::to_string(want));

    const double b_err = (pr.f->A() * xs - pr.f->b()).cwiseAbs().maxCoeff();
    worst = std::max(worst, b_err);
    if (b_err > 1e-12 * (1.0 + pr.f->b().cwiseAbs().maxCoeff())) failures.push_back("b != A x*");

    if (s.family == Family::NonnegKL) {
        const double col = (pr.f->A().colwise().sum().array() - 1.0).abs().maxCoeff();
        worst = std::max(worst, col);
        if (col > 1e-12) failures.push_back("column sums differ from 1");
        if (!(inst.x0.array() > 0.0).all()) failures.push_back("x0 not strictly positive");
        if (!(xs.array() >= 0.0).all()) failures.push_back("x* has negative entries");
    }
    if (s.family == Family::LpLSEq) {
        const double feas = std::abs(inst.x0.sum() - 1.0);
        worst = std::max(worst, feas);
        if (feas > 1e-12) failures.push_back("x0 violates 1^T x = 1");
    }
    if (!std::isfinite(pr.psi(inst.x0))) failures.push_back("x0 outside dom Psi");
    if (!pr.kernel.in_interior(inst.x0)) failures.push_back("x0 not interior to dom phi");

    std::string detail;
    for (const auto& f : failures) detail += f + "; ";
    return make_check("instance", worst, failures.empty(), detail);
}

AuditCheck check_derivatives(const std::string& name, const std::vector<Vector>& points,
                             const std::function<double(const Vector&)>& value,
                             const std::function<Vector(const Vector&)>& gradient,
                             double corruption, const FdConfig& fd) {
    CounterRng rng(0xfd, kAuditStream);
    double worst = 0.0;
    for (const Vector& x : points) {
        Vector g = gradient(x);
        g.array() += corruption;
        worst = std::max(worst, fd_gradient_error(value, g, x, pick_coords(rng, x.size()), fd));
    }
    return make_check(name, worst, worst <= fd.gradient_tol,
                      "limit " + format_double(fd.gradient_tol));
}

AuditCheck check_hessian(const std::string& name, const std::vector<Vector>& points,
                         const std::function<Vector(const Vector&)>& gradient,
                         const std::function<Vector(const Vector&, const Vector&)>& apply,
                         const FdConfig& fd) {
    CounterRng rng(0x4e55, kAuditStream);
    double worst = 0.0;
    for (const Vector& x : points) {
        const Vector u = rng.normal_vector(x.size()).normalized();
        worst = std::max(worst, fd_hessian_error(gradient, apply(x, u), x, u, fd));
    }
    return make_check(name, worst, worst <= fd.hessian_tol, "limit " + format_double(fd.hessian_tol));
}

// Small instance of the same family, where coordinate descent is affordable.
AuditCheck check_oracle(const InstanceSpec& spec, int points) {
    InstanceSpec small = spec;
    small.n = 6;
    small.m = 10;
    small.density = 0.5;
    const Instance inst = gen_instance(small);
    const CompositeProblem& pr = inst.problem;
    double worst = 0.0;
    for (const Vector& x : audit_points(inst, points, spec.seed ^ 0x0c1e)) {
        Vector y = x;
        if (pr.g.kind() == RegularizerKind::AffineEquality)
            y = project_onto_hyperplane(x, pr.g.a(), pr.g.gamma());
        const Metric metric = pr.kernel.metric(y);
        const Vector v = pr.f->gradient(y);
        const double lambda = 1.0 / lsmad_constant(*pr.f, pr.kernel);
        const Vector closed = solve_subproblem(pr.g, metric, lambda, v, y).d;
        const Vector brute = brute_force_direction(pr.g, metric, lambda, v, y);
        worst = std::max(worst, (closed - brute).cwiseAbs().maxCoeff());
    }
    return make_check("oracle", worst, worst <= kOracleTol, "limit " + format_double(kOracleTol));
}

AuditCheck check_descent(const Instance& inst, int iterations) {
    SolverConfig cfg;
    cfg.max_iter = iterations;
    const IterateTrace tr = abpg_solve(inst.problem, cfg, inst.x0);
    double worst = INFINITY;
    std::string detail = "ABPG " + to_string(tr.status) + " after " + std::to_string(tr.iterations()) + " steps";
    double prev = tr.initial.psi;
    for (const StepRecord& r : tr.records) {
        // rho <= -(1/2 lambda) <H d, d>
        const double model = -r.metric_quad / (2.0 * r.lambda) - r.model_decrease;
        // Psi_{k-1} - Psi_k >= (alpha sigma t / 2 lambda) ||d||^2
        const double decrease = (prev - r.psi) - cfg.alpha * tr.kernel_sigma * r.t /
                                                     (2.0 * r.lambda) * r.direction_norm * r.direction_norm;
        const double scale = 1.0 + std::abs(prev);
        worst = std::min({worst, model / scale, decrease / scale});
        prev = r.psi;
    }
    if (tr.records.empty()) worst = 0.0;
    return make_check("descent", worst, worst >= kDescentSlack, detail);
}

}  // namespace

double fd_gradient_error(const std::function<double(const Vector&)>& value, const Vector& grad,
                         const Vector& x, const std::vector<Eigen::Index>& coords,
                         const FdConfig& config) {
    double worst = 0.0;
    Vector y = x;
    for (Eigen::Index i : coords) {
        const double h = config.step * (1.0 + std::abs(x[i]));
        y[i] = x[i] + h;
        const double up = value(y);
        y[i] = x[i] - h;
        const double down = value(y);
        y[i] = x[i];
        worst = std::max(worst, std::abs((up - down) / (2.0 * h) - grad[i]));
    }
    return worst / std::max(1.0, grad.cwiseAbs().maxCoeff());
}

double fd_hessian_error(const std::function<Vector(const Vector&)>& gradient, const Vector& hu,
                        const Vector& x, const Vector& u, const FdConfig& config) {
    const double h = config.step * (1.0 + x.cwiseAbs().maxCoeff());
    const Vector fd = (gradient(x + h * u) - gradient(x - h * u)) / (2.0 * h);
    return (fd - hu).cwiseAbs().maxCoeff() / std::max(1.0, hu.cwiseAbs().maxCoeff());
}

std::vector<Vector> audit_points(const Instance& inst, int count, std::uint64_t seed) {
    CounterRng rng(seed, kAuditStream);
    std::vector<Vector> out;
    const Eigen::Index n = inst.x0.size();
    for (int j = 0; j < count; ++j) {
        Vector z = rng.normal_vector(n);
        Vector x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mag = 0.1 + std::abs(z[i]);
            x[i] = inst.spec.family == Family::NonnegKL ? mag : std::copysign(mag, z[i]);
        }
        out.push_back(std::move(x));
    }
    return out;
}

bool AuditReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

std::string AuditReport::text() const {
    std::ostringstream o;
    for (const auto& c : checks)
        o << (c.passed ? "PASS " : "FAIL ") << c.name << " worst=" << format_double(c.worst)
          << (c.detail.empty() ? "" : " " + c.detail) << '\n';
    return o.str();
}

AuditReport run_audit(const InstanceSpec& spec, const AuditOptions& opt) {
    AuditReport report;
    report.spec = spec;
    const Instance inst = gen_instance(spec);
    const CompositeProblem& pr = inst.problem;
    const auto points = audit_points(inst, opt.points, spec.seed);
    const SmoothObjective& f = *pr.f;
    const Kernel& phi = pr.kernel;

    report.checks.push_back(check_instance(inst));
    report.checks.push_back(check_derivatives(
        "gradient_f", points, [&](const Vector& x) { return f.value(x); },
        [&](const Vector& x) { return f.gradient(x); }, opt.gradient_corruption, opt.fd));
    report.checks.push_back(check_hessian(
        "hessian_f", points, [&](const Vector& x) { return f.gradient(x); },
        [&](const Vector& x, const Vector& u) { return Vector(f.hessian(x) * u); }, opt.fd));
    report.checks.push_back(check_derivatives(
        "gradient_phi", points, [&](const Vector& x) { return phi.value(x); },
        [&](const Vector& x) { return phi.gradient(x); }, 0.0, opt.fd));
    report.checks.push_back(check_hessian(
        "hessian_phi", points, [&](const Vector& x) { return phi.gradient(x); },
        [&](const Vector& x, const Vector& u) { return phi.hessian_apply(x, u); }, opt.fd));

    {
        const double L = lsmad_constant(f, phi) * opt.lsmad_scale;
        const auto xs = audit_points(inst, opt.lsmad_pairs, spec.seed ^ 0x1a);
        const auto ys = audit_points(inst, opt.lsmad_pairs, spec.seed ^ 0x2b);
        std::vector<std::pair<Vector, Vector>> pairs;
        for (int i = 0; i < opt.lsmad_pairs; ++i) pairs.emplace_back(xs[i], ys[i]);
        const LsmadReport lr = check_lsmad_sampled(f, phi, L, pairs);
        report.checks.push_back(make_check(
            "lsmad", lr.worst_slack, lr.passed(),
            "L=" + format_double(L) + " violations=" + std::to_string(lr.violations.size()) + "/" +
                std::to_string(lr.pairs_checked)));
    }
    report.checks.push_back(check_oracle(spec, std::max(1, opt.points / 4)));
    report.checks.push_back(check_descent(inst, opt.descent_iterations));
    return report;
}

}  // namespace bregman
