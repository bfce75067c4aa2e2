#include "nlkpp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlkpp/error.hpp"
#include "nlkpp/quadrature.hpp"

namespace nlkpp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

constexpr double kNearAbscissa = 1e-6;

double tabulated_at(const Tabulated& t, double y) {
    const double pos = (y - t.y0) / t.dy;
    const auto last = static_cast<double>(t.values.size() - 1);
    if (pos < 0.0 || pos > last) return 0.0;
    const auto i = std::min(static_cast<std::size_t>(pos), t.values.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return t.values[i] + frac * (t.values[i + 1] - t.values[i]);
}

double tabulated_end(const Tabulated& t) {
    return t.y0 + t.dy * static_cast<double>(t.values.size() - 1);
}

// 2(cosh z - 1)/z^2 and its derivative in z, with series near 0.
double tent_shape(double z) {
    if (std::abs(z) < 1e-3) {
        const double z2 = z * z;
        return 1.0 + z2 / 12.0 + z2 * z2 / 360.0;
    }
    return 2.0 * (std::cosh(z) - 1.0) / (z * z);
}

double tent_shape_derivative(double z) {
    if (std::abs(z) < 1e-3) return z / 6.0 + z * z * z / 90.0;
    return 2.0 * std::sinh(z) / (z * z) - 4.0 * (std::cosh(z) - 1.0) / (z * z * z);
}

}  // namespace

KernelSpec::KernelSpec(KernelFamily family, double scale) : family_(std::move(family)), scale_(scale) {
    validate();
}

KernelSpec KernelSpec::gaussian(double variance, double scale) { return {Gaussian{variance}, scale}; }

KernelSpec KernelSpec::laplace(double rate_left, double rate_right, double scale) {
    return {Laplace{rate_left, rate_right}, scale};
}

KernelSpec KernelSpec::tent(double halfwidth, double scale) { return {Tent{halfwidth}, scale}; }

KernelSpec KernelSpec::tabulated(double y0, double dy, std::vector<double> values, double scale) {
    return {Tabulated{y0, dy, std::move(values)}, scale};
}

std::string KernelSpec::family_name() const {
    return std::visit(overloaded{[](const Gaussian&) { return std::string("gaussian"); },
                                 [](const Laplace&) { return std::string("laplace"); },
                                 [](const Tent&) { return std::string("tent"); },
                                 [](const Tabulated&) { return std::string("tabulated"); }},
                      family_);
}

void KernelSpec::validate() const {
    if (!(scale_ > 0.0) || !std::isfinite(scale_))
        fail(ErrorKind::invalid_kernel, "kernel scale must be positive and finite");
    std::visit(overloaded{
                   [](const Gaussian& g) {
                       if (!(g.variance > 0.0) || !std::isfinite(g.variance))
                           fail(ErrorKind::invalid_kernel, "gaussian variance must be positive");
                   },
                   [](const Laplace& l) {
                       if (!(l.rate_left > 0.0) || !std::isfinite(l.rate_left))
                           fail(ErrorKind::invalid_kernel, "laplace rate_left must be positive");
                       if (!std::isfinite(l.rate_right) || l.rate_right < 0.0)
                           fail(ErrorKind::invalid_kernel, "laplace rate_right must be finite and >= 0");
                       if (l.rate_right == 0.0)
                           fail(ErrorKind::assumption_violation,
                                "laplace rate_right = 0: no exponential moment, sigma(K) = 0");
                   },
                   [](const Tent& t) {
                       if (!(t.halfwidth > 0.0) || !std::isfinite(t.halfwidth))
                           fail(ErrorKind::invalid_kernel, "tent halfwidth must be positive");
                   },
                   [](const Tabulated& t) {
                       if (t.values.size() < 2) fail(ErrorKind::invalid_kernel, "tabulated kernel needs >= 2 samples");
                       if (!(t.dy > 0.0) || !std::isfinite(t.dy) || !std::isfinite(t.y0))
                           fail(ErrorKind::invalid_kernel, "tabulated kernel grid must be uniform with dy > 0");
                       for (double v : t.values)
                           if (!std::isfinite(v) || v < 0.0)
                               fail(ErrorKind::invalid_kernel, "tabulated kernel samples must be finite and >= 0");
                       if (tabulated_at(t, 0.0) <= 0.0)
                           fail(ErrorKind::invalid_kernel, "tabulated kernel must be positive at y = 0");
                   }},
               family_);
    if (!(mass() > 0.0) || !std::isfinite(mass())) fail(ErrorKind::invalid_kernel, "kernel mass must be finite and positive");
}

double KernelSpec::evaluate(double y) const {
    const double v = std::visit(
        overloaded{[y](const Gaussian& g) {
                       return std::exp(-0.5 * y * y / g.variance) / std::sqrt(2.0 * std::numbers::pi * g.variance);
                   },
                   [y](const Laplace& l) {
                       const double w = l.rate_left * l.rate_right / (l.rate_left + l.rate_right);
                       return y >= 0.0 ? w * std::exp(-l.rate_right * y) : w * std::exp(l.rate_left * y);
                   },
                   [y](const Tent& t) {
                       const double a = std::abs(y);
                       return a < t.halfwidth ? (1.0 - a / t.halfwidth) / t.halfwidth : 0.0;
                   },
                   [y](const Tabulated& t) { return tabulated_at(t, y); }},
        family_);
    return scale_ * v;
}

double KernelSpec::mass() const {
    if (const auto* t = std::get_if<Tabulated>(&family_)) {
        double s = 0.0;
        for (double v : t->values) s += v;
        s -= 0.5 * (t->values.front() + t->values.back());
        return scale_ * s * t->dy;
    }
    return scale_;
}

double KernelSpec::abscissa() const {
    if (const auto* l = std::get_if<Laplace>(&family_)) return l->rate_right;
    return kInfinity;
}

void KernelSpec::check_lambda(double lambda) const {
    if (!(lambda >= 0.0)) fail(ErrorKind::domain, "lambda must be >= 0");
    const double sigma = abscissa();
    if (std::isfinite(sigma) && lambda > sigma * (1.0 - kNearAbscissa)) {
        std::ostringstream os;
        os << "lambda = " << lambda << " is not below the abscissa of convergence sigma(K) = " << sigma;
        fail(ErrorKind::domain, os.str());
    }
}

double KernelSpec::mgf(double lambda) const {
    check_lambda(lambda);
    if (lambda == 0.0) return mass();
    return std::visit(
        overloaded{[&](const Gaussian& g) { return scale_ * std::exp(0.5 * g.variance * lambda * lambda); },
                   [&](const Laplace& l) {
                       const double w = l.rate_left * l.rate_right / (l.rate_left + l.rate_right);
                       return scale_ * w * (1.0 / (l.rate_right - lambda) + 1.0 / (l.rate_left + lambda));
                   },
                   [&](const Tent& t) { return scale_ * tent_shape(lambda * t.halfwidth); },
                   [&](const Tabulated&) {
                       return integrate_against([lambda](double y) { return std::exp(lambda * y); });
                   }},
        family_);
}

double KernelSpec::big_l(double lambda) const {
    if (lambda == 0.0) return 0.0;
    return mgf(lambda) - mass();
}

double KernelSpec::mgf_derivative(double lambda) const {
    check_lambda(lambda);
    return std::visit(
        overloaded{[&](const Gaussian& g) {
                       return scale_ * g.variance * lambda * std::exp(0.5 * g.variance * lambda * lambda);
                   },
                   [&](const Laplace& l) {
                       const double w = l.rate_left * l.rate_right / (l.rate_left + l.rate_right);
                       const double r = l.rate_right - lambda;
                       const double q = l.rate_left + lambda;
                       return scale_ * w * (1.0 / (r * r) - 1.0 / (q * q));
                   },
                   [&](const Tent& t) { return scale_ * t.halfwidth * tent_shape_derivative(lambda * t.halfwidth); },
                   [&](const Tabulated&) {
                       return integrate_against([lambda](double y) { return y * std::exp(lambda * y); });
                   }},
        family_);
}

double KernelSpec::peak() const {
    return std::visit(overloaded{[&](const Gaussian&) { return evaluate(0.0); },
                                 [&](const Laplace&) { return evaluate(0.0); },
                                 [&](const Tent&) { return evaluate(0.0); },
                                 [&](const Tabulated& t) {
                                     return scale_ * *std::max_element(t.values.begin(), t.values.end());
                                 }},
                      family_);
}

bool KernelSpec::symmetric() const {
    return std::visit(overloaded{[](const Gaussian&) { return true; },
                                 [](const Laplace& l) { return l.rate_left == l.rate_right; },
                                 [](const Tent&) { return true; },
                                 [](const Tabulated& t) {
                                     const std::size_t n = t.values.size();
                                     const double end = tabulated_end(t);
                                     if (std::abs(t.y0 + end) > 1e-12 * t.dy) return false;
                                     for (std::size_t i = 0; i < n / 2; ++i)
                                         if (t.values[i] != t.values[n - 1 - i]) return false;
                                     return true;
                                 }},
                      family_);
}

bool KernelSpec::compact() const {
    return std::holds_alternative<Tent>(family_) || std::holds_alternative<Tabulated>(family_);
}

Interval KernelSpec::effective_support(double rel) const {
    const double decades = std::log(1.0 / rel);
    return std::visit(overloaded{[&](const Gaussian& g) {
                                     const double h = std::sqrt(2.0 * g.variance * decades);
                                     return Interval{-h, h};
                                 },
                                 [&](const Laplace& l) {
                                     return Interval{-decades / l.rate_left, decades / l.rate_right};
                                 },
                                 [](const Tent& t) { return Interval{-t.halfwidth, t.halfwidth}; },
                                 [](const Tabulated& t) { return Interval{t.y0, tabulated_end(t)}; }},
                      family_);
}

double KernelSpec::integrate_against(const std::function<double(double)>& g, std::span<const double> breaks,
                                     double* error) const {
    const Interval core = effective_support();
    std::vector<double> pts(breaks.begin(), breaks.end());
    if (std::holds_alternative<Laplace>(family_)) pts.push_back(0.0);
    if (const auto* t = std::get_if<Tabulated>(&family_)) {
        for (std::size_t i = 1; i + 1 < t->values.size(); ++i) pts.push_back(t->y0 + t->dy * static_cast<double>(i));
    }
    const auto integrand = [&](double y) { return evaluate(y) * g(y); };
    QuadratureResult total = integrate(integrand, core.lo, core.hi, pts);
    if (!compact()) {
        // Tails: keep adding blocks while they still matter relative to the running total.
        const double block = 0.25 * core.width();
        for (int side : {-1, 1}) {
            double edge = side > 0 ? core.hi : core.lo;
            for (int k = 0; k < 400; ++k) {
                const double a = side > 0 ? edge : edge - block;
                const double b = side > 0 ? edge + block : edge;
                const auto r = integrate(integrand, a, b, pts);
                total.value += r.value;
                total.error += r.error;
                edge = side > 0 ? b : a;
                if (std::abs(r.value) <= 1e-16 * std::abs(total.value) || r.value == 0.0) break;
            }
        }
    }
    if (error) *error = total.error;
    return total.value;
}

KernelSpec KernelSpec::reflected() const {
    return std::visit(overloaded{[&](const Gaussian& g) { return KernelSpec(g, scale_); },
                                 [&](const Laplace& l) { return KernelSpec(Laplace{l.rate_right, l.rate_left}, scale_); },
                                 [&](const Tent& t) { return KernelSpec(t, scale_); },
                                 [&](const Tabulated& t) {
                                     Tabulated r{-tabulated_end(t), t.dy, {t.values.rbegin(), t.values.rend()}};
                                     return KernelSpec(std::move(r), scale_);
                                 }},
                      family_);
}

KernelSpec KernelSpec::scaled(double factor) const { return KernelSpec(family_, scale_ * factor); }

double MinorantKernel::evaluate(double y) const {
    if (std::abs(y) >= delta) return 0.0;
    return apex * std::cos(std::numbers::pi * y / (2.0 * delta));
}

double MinorantKernel::mass() const { return apex * 4.0 * delta / std::numbers::pi; }

double MinorantKernel::mgf(double lambda) const {
    // ∫_{-δ}^{δ} cos(ay) e^{λy} dy = 2a cosh(λδ) / (λ² + a²), a = π/2δ.
    const double a = std::numbers::pi / (2.0 * delta);
    return apex * 2.0 * a * std::cosh(lambda * delta) / (lambda * lambda + a * a);
}

MinorantKernel minorant(const KernelSpec& kernel, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) fail(ErrorKind::invalid_parameters, "minorant delta must be positive");
    constexpr int kPoints = 20001;
    double m = kInfinity;
    for (int i = 0; i < kPoints; ++i) {
        const double y = -delta + 2.0 * delta * i / (kPoints - 1);
        m = std::min(m, kernel.evaluate(y));
    }
    if (!(m > 0.0)) {
        std::ostringstream os;
        os << "kernel vanishes inside [-" << delta << ", " << delta << "]; shrink delta";
        fail(ErrorKind::no_minorant, os.str());
    }
    return {delta, m};
}

}  // namespace nlkpp
