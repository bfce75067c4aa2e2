#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nlkpp/env.hpp"
#include "nlkpp/kernel.hpp"

namespace nlkpp {

struct ScalarMinimum {
    double argmin = 0.0;
    double value = 0.0;
    double scan_right_edge = 0.0;
};

/// Geometric scan over [lo, hi] followed by golden-section refinement of the
/// bracketing cell down to `width`.
ScalarMinimum scan_golden_minimize(const std::function<double(double)>& f, double lo, double hi, int scan_points,
                                   double width);

/// c(λ)(t) = (L(λ) + μ(t)) / λ
double c_lambda_t(const KernelSpec& kernel, const Coefficient& mu, double lambda, double t);

/// ⌊c(λ)⌋ = (L(λ) + ⌊μ⌋) / λ; throws assumption_violation unless ⌊μ⌋ > K̄.
double least_mean_speed(const KernelSpec& kernel, double mu_least_mean, double lambda);

struct SpeedCurve {
    KernelSpec kernel;
    double mu_least_mean = 0.0;
    std::vector<std::pair<double, double>> samples;
    double lambda_star = 0.0;
    double c_star = 0.0;
    bool star_interior = false;
    /// |c* - M'(λ*)| / c*, meaningful when star_interior.
    double identity_gap = 0.0;
    double scan_right_edge = 0.0;
};

struct MinimizeOptions {
    int scan_points = 64;
    double lambda_lo = 1e-4;
    double lambda_cap = 50.0;
    double width = 1e-8;
    int sample_count = 256;
};

SpeedCurve minimize_speed(const KernelSpec& kernel, double mu_least_mean, const MinimizeOptions& opts = {});

/// c(λ*)(t) for λ ≥ λ*, c(λ)(t) otherwise.
double c_plus(const SpeedCurve& curve, const Coefficient& mu, double lambda, double t);

/// (2R/π) ∫_{-B}^{B} K(z) e^{γz} sin(πz/2R) dz
double c_truncated(const KernelSpec& kernel, double gamma, double R, double B);

/// inf_{λ>0} (M_k(λ) - k̄ + m)/λ for the minorant k.
double c_autonomous(const MinorantKernel& k, double m);

struct AssumptionCheck {
    std::string id;
    std::string statement;
    bool passed = false;
    std::map<std::string, double> measured;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_passed() const;
    const AssumptionCheck* find(const std::string& id) const;
};

AssumptionReport check_assumptions(const KernelSpec& kernel, const Coefficient& mu, const LeastMeanEstimate& estimate);

}  // namespace nlkpp
