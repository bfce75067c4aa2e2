#include "nlkpp/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlkpp/error.hpp"

namespace nlkpp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double sinusoid_sum(const std::vector<Sinusoid>& terms, double t) {
    double s = 0.0;
    for (const auto& term : terms) s += term.amplitude * std::sin(term.angular_frequency * t + term.phase);
    return s;
}

double sinusoid_integral(const std::vector<Sinusoid>& terms, double t0, double t1) {
    double s = 0.0;
    for (const auto& term : terms) {
        const double w = term.angular_frequency;
        if (w == 0.0) {
            s += term.amplitude * std::sin(term.phase) * (t1 - t0);
        } else {
            s += term.amplitude * (std::cos(w * t0 + term.phase) - std::cos(w * t1 + term.phase)) / w;
        }
    }
    return s;
}

double sinusoid_constant_part(const std::vector<Sinusoid>& terms) {
    double s = 0.0;
    for (const auto& term : terms)
        if (term.angular_frequency == 0.0) s += term.amplitude * std::sin(term.phase);
    return s;
}

double sinusoid_oscillation(const std::vector<Sinusoid>& terms) {
    double s = 0.0;
    for (const auto& term : terms)
        if (term.angular_frequency != 0.0) s += std::abs(term.amplitude);
    return s;
}

double tabulated_end(const TabulatedSeries& s) { return s.t0 + s.dt * static_cast<double>(s.values.size() - 1); }

void check_terms(const std::vector<Sinusoid>& terms) {
    for (const auto& term : terms) {
        if (!std::isfinite(term.amplitude) || !std::isfinite(term.angular_frequency) || !std::isfinite(term.phase))
            fail(ErrorKind::invalid_parameters, "sinusoid parameters must be finite");
        if (term.angular_frequency < 0.0)
            fail(ErrorKind::invalid_parameters, "angular frequencies must be >= 0");
    }
}

}  // namespace

Coefficient::Coefficient(CoefficientForm form) : form_(std::move(form)) { validate(); }

Coefficient Coefficient::constant(double value) { return Coefficient(ConstantForm{value}); }

Coefficient Coefficient::periodic(double offset, std::vector<Sinusoid> terms) {
    return Coefficient(PeriodicForm{offset, std::move(terms)});
}

Coefficient Coefficient::quasiperiodic(double offset, std::vector<Sinusoid> terms) {
    return Coefficient(QuasiPeriodicForm{offset, std::move(terms)});
}

Coefficient Coefficient::piecewise(std::vector<double> breakpoints, std::vector<double> values, double ramp_width) {
    return Coefficient(PiecewiseForm{std::move(breakpoints), std::move(values), ramp_width});
}

Coefficient Coefficient::tabulated(double t0, double dt, std::vector<double> values) {
    return Coefficient(TabulatedSeries{t0, dt, std::move(values)});
}

std::string Coefficient::form_name() const {
    return std::visit(overloaded{[](const ConstantForm&) { return std::string("constant"); },
                                 [](const PeriodicForm&) { return std::string("periodic"); },
                                 [](const QuasiPeriodicForm&) { return std::string("quasiperiodic"); },
                                 [](const PiecewiseForm&) { return std::string("piecewise"); },
                                 [](const TabulatedSeries&) { return std::string("tabulated"); }},
                      form_);
}

void Coefficient::validate() {
    std::visit(overloaded{
                   [](const ConstantForm& c) {
                       if (!std::isfinite(c.value)) fail(ErrorKind::invalid_parameters, "constant must be finite");
                   },
                   [](const PeriodicForm& p) {
                       check_terms(p.terms);
                       double w0 = 0.0;
                       for (const auto& term : p.terms)
                           if (term.angular_frequency > 0.0 && (w0 == 0.0 || term.angular_frequency < w0))
                               w0 = term.angular_frequency;
                       for (const auto& term : p.terms) {
                           if (term.angular_frequency == 0.0) continue;
                           const double ratio = term.angular_frequency / w0;
                           if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
                               fail(ErrorKind::invalid_parameters,
                                    "periodic form needs frequencies that are integer multiples of the smallest");
                       }
                   },
                   [](const QuasiPeriodicForm& q) { check_terms(q.terms); },
                   [this](const PiecewiseForm& p) {
                       if (p.breakpoints.empty() || p.breakpoints.size() != p.values.size())
                           fail(ErrorKind::invalid_parameters, "piecewise form needs one value per breakpoint");
                       if (p.breakpoints.front() != 0.0)
                           fail(ErrorKind::invalid_parameters, "piecewise breakpoints must start at 0");
                       if (!(p.ramp_width >= 0.0)) fail(ErrorKind::invalid_parameters, "ramp_width must be >= 0");
                       for (std::size_t i = 1; i < p.breakpoints.size(); ++i) {
                           const double gap = p.breakpoints[i] - p.breakpoints[i - 1];
                           if (!(gap > 0.0)) fail(ErrorKind::invalid_parameters, "breakpoints must increase");
                           if (p.ramp_width >= gap)
                               fail(ErrorKind::invalid_parameters, "ramp_width must be smaller than every gap");
                       }
                       for (double v : p.values)
                           if (!std::isfinite(v)) fail(ErrorKind::invalid_parameters, "piecewise values must be finite");
                       knots_.assign({0.0});
                       knot_values_.assign({p.values.front()});
                       for (std::size_t i = 1; i < p.breakpoints.size(); ++i) {
                           knots_.push_back(p.breakpoints[i] - p.ramp_width);
                           knot_values_.push_back(p.values[i - 1]);
                           knots_.push_back(p.breakpoints[i]);
                           knot_values_.push_back(p.values[i]);
                       }
                       knot_integral_.assign(knots_.size(), 0.0);
                       for (std::size_t k = 1; k < knots_.size(); ++k)
                           knot_integral_[k] = knot_integral_[k - 1] +
                                               0.5 * (knot_values_[k] + knot_values_[k - 1]) * (knots_[k] - knots_[k - 1]);
                   },
                   [this](const TabulatedSeries& s) {
                       if (s.values.size() < 2) fail(ErrorKind::invalid_parameters, "tabulated series needs >= 2 samples");
                       if (!(s.dt > 0.0) || !(s.t0 <= 0.0))
                           fail(ErrorKind::invalid_parameters, "tabulated series needs dt > 0 and t0 <= 0");
                       for (double v : s.values)
                           if (!std::isfinite(v)) fail(ErrorKind::invalid_parameters, "tabulated values must be finite");
                       knot_integral_.assign(s.values.size(), 0.0);
                       for (std::size_t k = 1; k < s.values.size(); ++k)
                           knot_integral_[k] = knot_integral_[k - 1] + 0.5 * (s.values[k - 1] + s.values[k]) * s.dt;
                   }},
               form_);
}

double Coefficient::horizon() const {
    if (const auto* s = std::get_if<TabulatedSeries>(&form_)) return tabulated_end(*s) - shift_;
    return std::numeric_limits<double>::infinity();
}

double Coefficient::raw_eval(double t) const {
    return std::visit(
        overloaded{[](const ConstantForm& c) { return c.value; },
                   [t](const PeriodicForm& p) { return p.offset + sinusoid_sum(p.terms, t); },
                   [t](const QuasiPeriodicForm& q) { return q.offset + sinusoid_sum(q.terms, t); },
                   [&](const PiecewiseForm&) {
                       const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
                       if (it == knots_.end()) return knot_values_.back();
                       const auto j = static_cast<std::size_t>(it - knots_.begin());
                       if (j == 0) return knot_values_.front();
                       const double frac = (t - knots_[j - 1]) / (knots_[j] - knots_[j - 1]);
                       return knot_values_[j - 1] + frac * (knot_values_[j] - knot_values_[j - 1]);
                   },
                   [t](const TabulatedSeries& s) {
                       const double pos = (t - s.t0) / s.dt;
                       const auto i = std::min(static_cast<std::size_t>(pos), s.values.size() - 2);
                       const double frac = pos - static_cast<double>(i);
                       return s.values[i] + frac * (s.values[i + 1] - s.values[i]);
                   }},
        form_);
}

double Coefficient::raw_integral(double t0, double t1) const {
    return std::visit(
        overloaded{[&](const ConstantForm& c) { return c.value * (t1 - t0); },
                   [&](const PeriodicForm& p) { return p.offset * (t1 - t0) + sinusoid_integral(p.terms, t0, t1); },
                   [&](const QuasiPeriodicForm& q) { return q.offset * (t1 - t0) + sinusoid_integral(q.terms, t0, t1); },
                   [&](const PiecewiseForm&) {
                       const auto antiderivative = [&](double t) {
                           const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
                           const auto j = static_cast<std::size_t>(it - knots_.begin());
                           const std::size_t k = j - 1;
                           const double v = raw_eval(t);
                           return knot_integral_[k] + 0.5 * (knot_values_[k] + v) * (t - knots_[k]);
                       };
                       return antiderivative(t1) - antiderivative(t0);
                   },
                   [&](const TabulatedSeries& s) {
                       const auto antiderivative = [&](double t) {
                           const double pos = (t - s.t0) / s.dt;
                           const auto i = std::min(static_cast<std::size_t>(pos), s.values.size() - 2);
                           const double acc = knot_integral_[i];
                           const double ti = s.t0 + s.dt * static_cast<double>(i);
                           return acc + 0.5 * (s.values[i] + raw_eval(t)) * (t - ti);
                       };
                       return antiderivative(t1) - antiderivative(t0);
                   }},
        form_);
}

double Coefficient::eval(double t) const {
    if (!(t >= 0.0)) fail(ErrorKind::domain, "coefficient evaluated at negative time");
    if (t > horizon()) {
        std::ostringstream os;
        os << "t = " << t << " beyond coefficient horizon " << horizon();
        fail(ErrorKind::domain, os.str());
    }
    return raw_eval(t + shift_) + additive_;
}

double Coefficient::integral(double t0, double t1) const {
    if (!(t0 >= 0.0) || !(t1 >= t0)) fail(ErrorKind::domain, "integral needs 0 <= t0 <= t1");
    if (t1 > horizon()) {
        std::ostringstream os;
        os << "t = " << t1 << " beyond coefficient horizon " << horizon();
        fail(ErrorKind::domain, os.str());
    }
    if (t1 == t0) return 0.0;
    return raw_integral(t0 + shift_, t1 + shift_) + additive_ * (t1 - t0);
}

double Coefficient::inf_bound() const {
    const double v = std::visit(
        overloaded{[](const ConstantForm& c) { return c.value; },
                   [](const PeriodicForm& p) {
                       return p.offset + sinusoid_constant_part(p.terms) - sinusoid_oscillation(p.terms);
                   },
                   [](const QuasiPeriodicForm& q) {
                       return q.offset + sinusoid_constant_part(q.terms) - sinusoid_oscillation(q.terms);
                   },
                   [](const PiecewiseForm& p) { return *std::min_element(p.values.begin(), p.values.end()); },
                   [](const TabulatedSeries& s) { return *std::min_element(s.values.begin(), s.values.end()); }},
        form_);
    return v + additive_;
}

double Coefficient::sup_bound() const {
    const double v = std::visit(
        overloaded{[](const ConstantForm& c) { return c.value; },
                   [](const PeriodicForm& p) {
                       return p.offset + sinusoid_constant_part(p.terms) + sinusoid_oscillation(p.terms);
                   },
                   [](const QuasiPeriodicForm& q) {
                       return q.offset + sinusoid_constant_part(q.terms) + sinusoid_oscillation(q.terms);
                   },
                   [](const PiecewiseForm& p) { return *std::max_element(p.values.begin(), p.values.end()); },
                   [](const TabulatedSeries& s) { return *std::max_element(s.values.begin(), s.values.end()); }},
        form_);
    return v + additive_;
}

double Coefficient::sup_abs() const { return std::max(std::abs(inf_bound()), std::abs(sup_bound())); }

std::optional<double> Coefficient::period() const {
    if (std::holds_alternative<ConstantForm>(form_)) return 0.0;
    if (const auto* p = std::get_if<PeriodicForm>(&form_)) {
        double w0 = 0.0;
        for (const auto& term : p->terms)
            if (term.angular_frequency > 0.0 && (w0 == 0.0 || term.angular_frequency < w0)) w0 = term.angular_frequency;
        if (w0 == 0.0) return 0.0;
        return 2.0 * std::numbers::pi / w0;
    }
    return std::nullopt;
}

bool Coefficient::is_analytic() const {
    return std::holds_alternative<ConstantForm>(form_) || std::holds_alternative<PeriodicForm>(form_) ||
           std::holds_alternative<QuasiPeriodicForm>(form_);
}

bool Coefficient::uniformly_continuous() const {
    if (const auto* p = std::get_if<PiecewiseForm>(&form_)) return p->breakpoints.size() == 1 || p->ramp_width > 0.0;
    return true;
}

Coefficient Coefficient::shifted(double s0) const {
    if (!(s0 >= 0.0)) fail(ErrorKind::invalid_parameters, "time shift must be >= 0");
    Coefficient c = *this;
    c.shift_ += s0;
    return c;
}

Coefficient Coefficient::plus_constant(double kappa) const {
    Coefficient c = *this;
    c.additive_ += kappa;
    return c;
}

Coefficient dyadic_on_off(int k_max, double low, double high) {
    std::vector<double> b{0.0};
    std::vector<double> v{high};
    double p = 1.0;
    for (int k = 0; k <= k_max; ++k, p *= 4.0) {
        b.push_back(p);
        v.push_back(low);
        b.push_back(2.0 * p);
        v.push_back(high);
    }
    return Coefficient::piecewise(std::move(b), std::move(v));
}

LeastMeanEstimate least_mean(const Coefficient& c, double t_max, double s_max, const LeastMeanOptions& opts) {
    if (!(t_max > 0.0) || !(s_max >= 0.0)) fail(ErrorKind::invalid_parameters, "least_mean needs T_max > 0, s_max >= 0");
    if (opts.levels < 1) fail(ErrorKind::invalid_parameters, "least_mean needs at least one ladder level");
    if (t_max + s_max > c.horizon()) {
        std::ostringstream os;
        os << "coefficient horizon " << c.horizon() << " < T_max + s_max = " << t_max + s_max;
        fail(ErrorKind::insufficient_horizon, os.str());
    }
    double ds = opts.shift_spacing;
    if (ds <= 0.0) {
        ds = 0.01;
        if (const auto per = c.period(); per && *per > 0.0) ds = std::min(0.01, *per / 100.0);
    }
    const auto n_shifts = static_cast<long>(std::floor(s_max / ds)) + 1;

    LeastMeanEstimate est;
    for (int k = opts.levels - 1; k >= 0; --k) {
        const double window = t_max / std::ldexp(1.0, k);
        double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : best) schedule(static)
        for (long i = 0; i < n_shifts; ++i) {
            const double s = std::min(static_cast<double>(i) * ds, s_max);
            best = std::min(best, c.integral(s, s + window) / window);
        }
        est.window_sequence.emplace_back(window, best);
    }
    est.value = est.window_sequence.back().second;
    if (est.window_sequence.size() >= 2) {
        const double prev = est.window_sequence[est.window_sequence.size() - 2].second;
        est.tolerance_achieved = std::abs(est.value - prev);
        est.converged = est.tolerance_achieved < 1e-3 * (c.sup_bound() - c.inf_bound() + 1.0);
    } else {
        est.tolerance_achieved = std::numeric_limits<double>::infinity();
    }
    return est;
}

std::optional<double> mean_value(const Coefficient& c) {
    const auto base = std::visit(
        overloaded{[](const ConstantForm& f) -> std::optional<double> { return f.value; },
                   [](const PeriodicForm& p) -> std::optional<double> {
                       return p.offset + sinusoid_constant_part(p.terms);
                   },
                   [](const QuasiPeriodicForm& q) -> std::optional<double> {
                       return q.offset + sinusoid_constant_part(q.terms);
                   },
                   [](const PiecewiseForm&) -> std::optional<double> { return std::nullopt; },
                   [](const TabulatedSeries&) -> std::optional<double> { return std::nullopt; }},
        c.form());
    if (!base) return std::nullopt;
    return *base + c.additive();
}

double dual_least_mean_check(const Coefficient& c, double a_slope_bound) {
    const auto per = c.period();
    if (!per) fail(ErrorKind::unsupported, "dual least-mean check needs a periodic coefficient");
    const double mean = *mean_value(c);
    if (*per == 0.0) {
        if (a_slope_bound <= 0.0) fail(ErrorKind::invalid_parameters, "a_slope_bound must be positive");
        return c.eval(0.0);
    }
    const auto a = [&](double t) { return mean * t - c.integral(0.0, t); };
    constexpr int kSamples = 10000;
    const double h = 1e-5 * *per;
    double best = std::numeric_limits<double>::infinity();
    double slope = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double t = h + *per * i / kSamples;
        const double da = (a(t + h) - a(t - h)) / (2.0 * h);
        slope = std::max(slope, std::abs(da));
        best = std::min(best, da + c.eval(t));
    }
    if (slope > a_slope_bound) {
        std::ostringstream os;
        os << "optimal adjuster slope " << slope << " exceeds bound " << a_slope_bound;
        fail(ErrorKind::invalid_parameters, os.str());
    }
    return best;
}

Adjuster Adjuster::zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, 0.0};
}

Adjuster Adjuster::from_mean(const Coefficient& c, double factor) {
    const auto mean = mean_value(c);
    if (!mean) fail(ErrorKind::unsupported, "adjuster needs a coefficient with a mean value");
    double bound = 0.0;
    const auto add_terms = [&](const std::vector<Sinusoid>& terms) {
        for (const auto& term : terms)
            if (term.angular_frequency > 0.0) bound += 2.0 * std::abs(term.amplitude) / term.angular_frequency;
    };
    if (const auto* p = std::get_if<PeriodicForm>(&c.form())) add_terms(p->terms);
    if (const auto* q = std::get_if<QuasiPeriodicForm>(&c.form())) add_terms(q->terms);
    const double m = *mean;
    return {[c, m, factor](double t) { return factor * (m * t - c.integral(0.0, t)); },
            [c, m, factor](double t) { return factor * (m - c.eval(t)); }, std::abs(factor) * bound};
}

}  // namespace nlkpp
