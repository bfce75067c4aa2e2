#include "nlkpp/speed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlkpp/error.hpp"

namespace nlkpp {

ScalarMinimum scan_golden_minimize(const std::function<double(double)>& f, double lo, double hi, int scan_points,
                                   double width) {
    if (!(lo > 0.0) || !(hi > lo) || scan_points < 3)
        fail(ErrorKind::invalid_parameters, "scan needs 0 < lo < hi and >= 3 points");
    std::vector<double> xs(static_cast<std::size_t>(scan_points));
    std::vector<double> fs(xs.size());
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = i + 1 == xs.size() ? hi : lo * std::exp(ratio * static_cast<double>(i) / (scan_points - 1));
        fs[i] = f(xs[i]);
    }
    const auto best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    double a = xs[best == 0 ? 0 : best - 1];
    double b = xs[std::min(best + 1, xs.size() - 1)];

    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > width) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    ScalarMinimum m{0.5 * (a + b), 0.0, hi};
    m.value = f(m.argmin);
    // The scan point itself may beat the refined interior point at the edges.
    if (fs[best] < m.value) {
        m.argmin = xs[best];
        m.value = fs[best];
    }
    return m;
}

double c_lambda_t(const KernelSpec& kernel, const Coefficient& mu, double lambda, double t) {
    if (!(lambda > 0.0) || !(lambda < kernel.abscissa()))
        fail(ErrorKind::domain, "c(lambda)(t) needs 0 < lambda < sigma(K)");
    return (kernel.big_l(lambda) + mu.eval(t)) / lambda;
}

namespace {

void require_least_mean_above_mass(const KernelSpec& kernel, double mu_least_mean) {
    if (!(mu_least_mean > kernel.mass())) {
        std::ostringstream os;
        os << "least mean of mu (" << mu_least_mean << ") must exceed kernel mass K̄ (" << kernel.mass()
           << "): ⌊μ⌋ > K̄ fails";
        fail(ErrorKind::assumption_violation, os.str());
    }
}

}  // namespace

double least_mean_speed(const KernelSpec& kernel, double mu_least_mean, double lambda) {
    require_least_mean_above_mass(kernel, mu_least_mean);
    if (!(lambda > 0.0) || !(lambda < kernel.abscissa()))
        fail(ErrorKind::domain, "least-mean speed needs 0 < lambda < sigma(K)");
    return (kernel.big_l(lambda) + mu_least_mean) / lambda;
}

SpeedCurve minimize_speed(const KernelSpec& kernel, double mu_least_mean, const MinimizeOptions& opts) {
    require_least_mean_above_mass(kernel, mu_least_mean);
    const double sigma = kernel.abscissa();
    const double hi = std::min(std::isfinite(sigma) ? sigma * (1.0 - 1e-6) : opts.lambda_cap, opts.lambda_cap);
    const auto speed = [&](double lambda) { return (kernel.big_l(lambda) + mu_least_mean) / lambda; };
    const auto m = scan_golden_minimize(speed, opts.lambda_lo, hi, opts.scan_points, opts.width);

    SpeedCurve curve{kernel, mu_least_mean, {}, m.argmin, m.value, false, 0.0, hi};
    curve.star_interior = hi - m.argmin > 1e-4;
    if (curve.star_interior) {
        curve.identity_gap = std::abs(curve.c_star - kernel.mgf_derivative(curve.lambda_star)) / curve.c_star;
        if (curve.identity_gap > 1e-6) {
            std::ostringstream os;
            os << "interior minimizer fails c* = M'(λ*): relative gap " << curve.identity_gap;
            fail(ErrorKind::numerical, os.str());
        }
    }
    if (opts.sample_count > 1) {
        // Plot range: a decade and a half around λ* when it is interior, else the full scan.
        const double lo = curve.star_interior ? std::max(opts.lambda_lo, curve.lambda_star / 50.0) : opts.lambda_lo;
        const double top = curve.star_interior ? std::min(hi, 4.0 * curve.lambda_star) : hi;
        const double ratio = std::log(top / lo);
        curve.samples.reserve(static_cast<std::size_t>(opts.sample_count));
        for (int i = 0; i < opts.sample_count; ++i) {
            const double lambda = i + 1 == opts.sample_count ? top : lo * std::exp(ratio * i / (opts.sample_count - 1));
            curve.samples.emplace_back(lambda, speed(lambda));
        }
    }
    return curve;
}

double c_plus(const SpeedCurve& curve, const Coefficient& mu, double lambda, double t) {
    if (!curve.star_interior)
        fail(ErrorKind::unsupported, "c+ needs an interior minimizer (λ* < σ(K))");
    if (!(lambda > 0.0)) fail(ErrorKind::domain, "c+ needs lambda > 0");
    return c_lambda_t(curve.kernel, mu, lambda >= curve.lambda_star ? curve.lambda_star : lambda, t);
}

double c_truncated(const KernelSpec& kernel, double gamma, double R, double B) {
    if (!(gamma >= 0.0) || !(gamma < kernel.abscissa()))
        fail(ErrorKind::domain, "c_{R,B}(gamma) needs 0 <= gamma < sigma(K)");
    if (!(R > 0.0) || !(B > 0.0)) fail(ErrorKind::domain, "c_{R,B}(gamma) needs R, B > 0");
    const double b = std::numbers::pi / (2.0 * R);
    const auto g = [=](double z) { return std::abs(z) <= B ? std::exp(gamma * z) * std::sin(b * z) : 0.0; };
    const double breaks[] = {-B, B};
    return kernel.integrate_against(g, breaks) / b;
}

double c_autonomous(const MinorantKernel& k, double m) {
    if (!(m > 0.0)) fail(ErrorKind::invalid_parameters, "c_0 needs m > 0");
    if (!(k.delta > 0.0) || !(k.apex > 0.0)) fail(ErrorKind::invalid_parameters, "invalid minorant kernel");
    const double kbar = k.mass();
    const auto f = [&](double lambda) { return (k.mgf(lambda) - kbar + m) / lambda; };
    return scan_golden_minimize(f, 1e-4, 50.0 / k.delta, 64, 1e-10).value;
}

bool AssumptionReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& id) const {
    for (const auto& c : checks)
        if (c.id == id) return &c;
    return nullptr;
}

AssumptionReport check_assumptions(const KernelSpec& kernel, const Coefficient& mu, const LeastMeanEstimate& estimate) {
    AssumptionReport report;
    const double kbar = kernel.mass();
    const double sigma = kernel.abscissa();

    {
        const Interval s = kernel.effective_support();
        double kmin = kInfinity;
        constexpr int kPoints = 10001;
        for (int i = 0; i < kPoints; ++i) kmin = std::min(kmin, kernel.evaluate(s.lo + s.width() * i / (kPoints - 1)));
        report.checks.push_back({"kernel_nonnegative_integrable", "K ≥ 0, continuous, ∫K < ∞",
                                 kmin >= 0.0 && std::isfinite(kbar) && kbar > 0.0,
                                 {{"min_sampled_K", kmin}, {"mass", kbar}}});
    }
    report.checks.push_back({"kernel_exponential_moment", "∫K e^{αy} < ∞ for some α > 0 (σ(K) > 0)", sigma > 0.0,
                             {{"sigma", sigma}}});
    report.checks.push_back(
        {"kernel_positive_at_origin", "K(0) > 0", kernel.evaluate(0.0) > 0.0, {{"K0", kernel.evaluate(0.0)}}});

    const double h0 = mu.inf_bound();
    report.checks.push_back({"growth_rate_positive_continuous", "μ bounded, uniformly continuous, inf μ > 0",
                             h0 > 0.0 && mu.uniformly_continuous() && std::isfinite(mu.sup_abs()),
                             {{"inf_mu", h0},
                              {"sup_mu", mu.sup_bound()},
                              {"uniformly_continuous", mu.uniformly_continuous() ? 1.0 : 0.0}}});

    const bool above_mass = estimate.value > kbar;
    report.checks.push_back({"least_mean_exceeds_mass", "⌊μ⌋ > K̄", above_mass,
                             {{"least_mean", estimate.value},
                              {"mass", kbar},
                              {"least_mean_converged", estimate.converged ? 1.0 : 0.0}}});

    AssumptionCheck interior{"minimizer_interior", "λ_r* < σ(K)", false, {{"sigma", sigma}}};
    if (above_mass) {
        const SpeedCurve curve = minimize_speed(kernel, estimate.value, {.sample_count = 0});
        interior.passed = curve.star_interior;
        interior.measured["lambda_star"] = curve.lambda_star;
        interior.measured["c_star"] = curve.c_star;
    } else {
        interior.measured["skipped"] = 1.0;
    }
    report.checks.push_back(std::move(interior));
    return report;
}

}  // namespace nlkpp
