#include "nlkpp/fronts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlkpp/error.hpp"

namespace nlkpp {

std::optional<double> track_front(const Field& field, double theta) {
    const auto& u = field.values;
    for (std::size_t i = u.size(); i-- > 0;) {
        if (u[i] < theta) continue;
        if (i + 1 == u.size()) return field.grid.x(static_cast<int>(i));
        const double a = u[i];
        const double b = u[i + 1];
        return field.grid.x(static_cast<int>(i)) + (a - theta) / (a - b) * field.grid.dx;
    }
    return std::nullopt;
}

FrontTracker::FrontTracker(std::vector<double> thetas, double guard_x)
    : guard_x_(guard_x), traces_(std::make_shared<std::vector<FrontTrace>>()) {
    for (double th : thetas) {
        if (!(th > 0.0 && th < 1.0)) fail(ErrorKind::invalid_parameters, "front thresholds must lie in (0, 1)");
        traces_->push_back({th, {}});
    }
}

Observer FrontTracker::observer() {
    auto traces = traces_;
    const double guard = guard_x_;
    return [traces, guard](const Field& f) {
        for (auto& tr : *traces) {
            const auto x = track_front(f, tr.theta);
            if (x && *x < guard) tr.points.emplace_back(f.t, *x);
        }
    };
}

const FrontTrace& FrontTracker::trace(double theta) const {
    for (const auto& tr : *traces_)
        if (tr.theta == theta) return tr;
    fail(ErrorKind::invalid_parameters, "no trace recorded for the requested threshold");
}

SpeedFit fit_speed(const FrontTrace& trace, double t_lo, double t_hi) {
    SpeedFit fit{t_lo, t_hi, 0.0, 0.0, 0.0, 0};
    double st = 0.0, sx = 0.0;
    for (auto [t, x] : trace.points) {
        if (t < t_lo || t > t_hi) continue;
        st += t;
        sx += x;
        ++fit.points;
    }
    if (fit.points < 8) {
        std::ostringstream os;
        os << "only " << fit.points << " front points in [" << t_lo << ", " << t_hi << "]; need 8";
        fail(ErrorKind::insufficient_data, os.str());
    }
    const double n = static_cast<double>(fit.points);
    const double tm = st / n;
    const double xm = sx / n;
    double stt = 0.0, stx = 0.0;
    for (auto [t, x] : trace.points) {
        if (t < t_lo || t > t_hi) continue;
        stt += (t - tm) * (t - tm);
        stx += (t - tm) * (x - xm);
    }
    fit.slope = stx / stt;
    fit.intercept = xm - fit.slope * tm;
    double ss = 0.0;
    for (auto [t, x] : trace.points) {
        if (t < t_lo || t > t_hi) continue;
        const double r = x - (fit.intercept + fit.slope * t);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

double burn_in_time(double kernel_mass, double t_end) { return std::max(10.0 / kernel_mass, 0.2 * t_end); }

Envelope theoretical_envelope(const SpeedCurve& curve, const Coefficient& mu, std::optional<double> lambda_init,
                              std::span<const double> t_grid) {
    if (!curve.star_interior)
        fail(ErrorKind::unsupported, "envelopes need an interior minimizer (λ* < σ(K))");
    if (lambda_init && !(*lambda_init > 0.0)) fail(ErrorKind::invalid_parameters, "initial decay rate must be positive");
    Envelope env;
    env.slow_decay = lambda_init && *lambda_init < curve.lambda_star;
    env.lambda_upper = env.slow_decay ? *lambda_init : curve.lambda_star;
    const double big_l = curve.kernel.big_l(env.lambda_upper);
    env.upper_mean_slope = (big_l + curve.mu_least_mean) / env.lambda_upper;
    env.lower_slope = env.slow_decay ? env.upper_mean_slope : curve.c_star;
    env.t.assign(t_grid.begin(), t_grid.end());
    for (double t : env.t) {
        env.upper.push_back((big_l * t + mu.integral(0.0, t)) / env.lambda_upper);
        env.lower.push_back(env.lower_slope * t);
    }
    return env;
}

double min_over(const Field& field, double x_lo, double x_hi) {
    double m = 1.0;
    for (int i = 0; i < field.grid.n; ++i) {
        const double x = field.grid.x(i);
        if (x >= x_lo && x <= x_hi) m = std::min(m, field.values[static_cast<std::size_t>(i)]);
    }
    return m;
}

double max_beyond(const Field& field, double x0) {
    double m = 0.0;
    for (int i = 0; i < field.grid.n; ++i)
        if (field.grid.x(i) >= x0) m = std::max(m, field.values[static_cast<std::size_t>(i)]);
    return m;
}

Verdict verdict(const FrontTrace& trace, const Envelope& envelope, const Field& final_field,
                const VerdictOptions& opts) {
    if (envelope.t.empty()) fail(ErrorKind::invalid_parameters, "empty envelope");
    Verdict v;
    const auto upper_at = [&](double t) {
        // Envelope grids are increasing; interpolate linearly.
        const auto it = std::lower_bound(envelope.t.begin(), envelope.t.end(), t);
        if (it == envelope.t.begin()) return envelope.upper.front();
        if (it == envelope.t.end()) return envelope.upper.back();
        const auto i = static_cast<std::size_t>(it - envelope.t.begin());
        const double w = (t - envelope.t[i - 1]) / (envelope.t[i] - envelope.t[i - 1]);
        return (1.0 - w) * envelope.upper[i - 1] + w * envelope.upper[i];
    };

    VerdictCheck upper{"upper_envelope", true, {}};
    double worst = -kInfinity;
    double worst_t = 0.0;
    for (auto [t, x] : trace.points) {
        if (t < opts.burn_in) continue;
        const double excess = x - (upper_at(t) + opts.eta * t);
        if (excess > worst) {
            worst = excess;
            worst_t = t;
        }
    }
    upper.passed = worst <= opts.position_tolerance;
    upper.numbers = {{"max_excess", worst}, {"at_t", worst_t}, {"eta", opts.eta}};
    v.checks.push_back(upper);

    const double fit_lo = opts.fit_hi > opts.fit_lo ? opts.fit_lo : opts.burn_in;
    const double fit_hi = opts.fit_hi > opts.fit_lo ? opts.fit_hi : final_field.t;
    v.fit = fit_speed(trace, fit_lo, fit_hi);
    VerdictCheck slope{"slope_bounds", false, {}};
    const double lo = envelope.lower_slope - opts.speed_tolerance;
    const double hi = envelope.upper_mean_slope + opts.eta + opts.speed_tolerance;
    slope.passed = v.fit.slope >= lo && v.fit.slope <= hi;
    slope.numbers = {{"fitted", v.fit.slope},
                     {"lower_bound", lo},
                     {"upper_bound", hi},
                     {"residual_rms", v.fit.residual_rms}};
    v.checks.push_back(slope);

    if (opts.check_inner) {
        VerdictCheck inner{"inner_region", false, {}};
        const double reach = 0.9 * envelope.lower_slope * final_field.t;
        const double m = min_over(final_field, 0.0, reach);
        inner.passed = m >= 1.0 - opts.inner_tolerance;
        inner.numbers = {{"x_hi", reach}, {"min_u", m}, {"t", final_field.t}};
        v.checks.push_back(inner);
    }
    v.pass = std::all_of(v.checks.begin(), v.checks.end(), [](const auto& c) { return c.passed; });
    return v;
}

}  // namespace nlkpp
