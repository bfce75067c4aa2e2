#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nlkpp {

/// amplitude * sin(angular_frequency * t + phase)
struct Sinusoid {
    double amplitude = 0.0;
    double angular_frequency = 0.0;
    double phase = 0.0;
};

struct ConstantForm {
    double value = 0.0;
};

/// offset + Σ sinusoids; all frequencies integer multiples of the smallest one.
struct PeriodicForm {
    double offset = 0.0;
    std::vector<Sinusoid> terms;
};

/// offset + Σ sinusoids with arbitrary (typically incommensurate) frequencies.
struct QuasiPeriodicForm {
    double offset = 0.0;
    std::vector<Sinusoid> terms;
};

/// Step function: values[i] on [breakpoints[i], breakpoints[i+1]), last value
/// held forever. breakpoints[0] must be 0. A positive ramp_width replaces each
/// jump by a linear ramp on [b_i - w, b_i]; ramp_width = 0 keeps raw jumps.
struct PiecewiseForm {
    std::vector<double> breakpoints;
    std::vector<double> values;
    double ramp_width = 0.0;
};

/// Samples at t0 + i*dt, linearly interpolated; defined up to the last sample.
struct TabulatedSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;
};

using CoefficientForm = std::variant<ConstantForm, PeriodicForm, QuasiPeriodicForm, PiecewiseForm, TabulatedSeries>;

/// Time coefficient μ(t), t ≥ 0. Immutable; shifted()/plus_constant() derive new values.
class Coefficient {
public:
    explicit Coefficient(CoefficientForm form);

    static Coefficient constant(double value);
    static Coefficient periodic(double offset, std::vector<Sinusoid> terms);
    static Coefficient quasiperiodic(double offset, std::vector<Sinusoid> terms);
    static Coefficient piecewise(std::vector<double> breakpoints, std::vector<double> values, double ramp_width = 0.0);
    static Coefficient tabulated(double t0, double dt, std::vector<double> values);

    const CoefficientForm& form() const { return form_; }
    std::string form_name() const;
    double time_shift() const { return shift_; }
    double additive() const { return additive_; }

    /// Largest t at which μ is defined (+inf for analytic and piecewise forms).
    double horizon() const;

    double eval(double t) const;
    double operator()(double t) const { return eval(t); }
    /// ∫_{t0}^{t1} μ(s) ds.
    double integral(double t0, double t1) const;

    /// Rigorous lower/upper bounds on μ over [0, horizon]; exact for constant,
    /// single-term periodic, piecewise and tabulated forms.
    double inf_bound() const;
    double sup_bound() const;
    double sup_abs() const;

    /// Smallest period for periodic/constant forms.
    std::optional<double> period() const;
    bool is_analytic() const;
    /// False for piecewise forms with raw jumps.
    bool uniformly_continuous() const;

    /// t -> μ(t + s0)
    Coefficient shifted(double s0) const;
    /// t -> μ(t) + kappa
    Coefficient plus_constant(double kappa) const;

private:
    void validate();
    double raw_eval(double t) const;
    double raw_integral(double t0, double t1) const;

    CoefficientForm form_;
    double shift_ = 0.0;
    double additive_ = 0.0;
    // Piecewise-linear representation for piecewise forms: knots and values, with
    // duplicated knots at raw jumps, and the running integral at each knot.
    std::vector<double> knots_;
    std::vector<double> knot_values_;
    std::vector<double> knot_integral_;
};

/// μ = low on [4^k, 2·4^k) for k = 0..k_max, high elsewhere (raw jumps).
Coefficient dyadic_on_off(int k_max, double low = 1.0, double high = 2.0);

struct LeastMeanEstimate {
    double value = 0.0;
    /// (T, inf_s window average), increasing T.
    std::vector<std::pair<double, double>> window_sequence;
    bool converged = false;
    double tolerance_achieved = 0.0;
};

struct LeastMeanOptions {
    int levels = 8;
    /// Shift-grid spacing; 0 selects min(0.01, period/100) for periodic forms and 0.01 otherwise.
    double shift_spacing = 0.0;
};

/// Finite-window estimate of lim_{T→∞} inf_{s>0} (1/T)∫_0^T μ(t+s) dt over the
/// ladder T_max/2^k, k = levels-1..0.
LeastMeanEstimate least_mean(const Coefficient& c, double t_max, double s_max, const LeastMeanOptions& opts = {});

/// Uniform mean value for constant, periodic and quasi-periodic forms; nullopt otherwise.
std::optional<double> mean_value(const Coefficient& c);

/// inf_t (a' + μ)(t) with a' = ⟨μ⟩ - μ. Periodic (or constant) input only; throws
/// invalid_parameters when sup|a'| exceeds a_slope_bound.
double dual_least_mean_check(const Coefficient& c, double a_slope_bound);

/// Bounded time adjuster a(t) with its derivative, as used by the sub-solution witnesses.
struct Adjuster {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    double sup_abs = 0.0;

    static Adjuster zero();
    /// a(t) = factor * (⟨μ⟩ t - ∫_0^t μ), so factor*(a'/factor + μ) is constant.
    static Adjuster from_mean(const Coefficient& c, double factor = 1.0);
};

}  // namespace nlkpp
