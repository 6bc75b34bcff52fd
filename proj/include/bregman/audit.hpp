#pragma once

// Invariant audit of a generated instance: derivative checks by central finite
// differences, the sampled L-smad certificate, closed form vs. brute-force
// directions, and the per-step descent inequalities of a short ABPG run.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bregman/instance.hpp"

namespace bregman {

struct FdConfig {
    double step = 1e-6;           // h_i = step * (1 + |x_i|)
    double gradient_tol = 1e-6;   // relative to max(1, ||g||_inf)
    double hessian_tol = 1e-5;
};

/// max_i |fd_i - grad_i| / max(1, ||grad||_inf) over the given coordinates.
double fd_gradient_error(const std::function<double(const Vector&)>& value, const Vector& grad,
                         const Vector& x, const std::vector<Eigen::Index>& coords,
                         const FdConfig& config = {});

/// ||(grad(x + h u) - grad(x - h u)) / 2h - Hu||_inf / max(1, ||Hu||_inf) with
/// h = step * (1 + ||x||_inf).
double fd_hessian_error(const std::function<Vector(const Vector&)>& gradient, const Vector& hu,
                        const Vector& x, const Vector& u, const FdConfig& config = {});

struct AuditOptions {
    /// Test hook: added to every analytic gradient entry before comparison.
    double gradient_corruption = 0.0;
    /// Multiplies the certified L-smad constant (0.1 understates it 10x).
    double lsmad_scale = 1.0;
    int points = 20;
    int lsmad_pairs = 200;
    int descent_iterations = 50;
    FdConfig fd;
};

struct AuditCheck {
    std::string name;
    bool passed = false;
    double worst = 0.0;  // worst error, or worst slack for inequality checks
    std::string detail;
};

struct AuditReport {
    InstanceSpec spec;
    std::vector<AuditCheck> checks;
    bool passed() const;
    /// One "PASS|FAIL <name> worst=<value> <detail>" line per check.
    std::string text() const;
};

AuditReport run_audit(const InstanceSpec& spec, const AuditOptions& options = {});

/// Random points where every catalog derivative exists: coordinates bounded
/// away from 0 for l_p terms, strictly positive for the KL family.
std::vector<Vector> audit_points(const Instance& instance, int count, std::uint64_t seed);

}  // namespace bregman
