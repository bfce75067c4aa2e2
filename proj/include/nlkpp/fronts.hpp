#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlkpp/dynamics.hpp"
#include "nlkpp/speed.hpp"

namespace nlkpp {

struct FrontTrace {
    double theta = 0.5;
    std::vector<std::pair<double, double>> points;  // (t, X_θ(t))
};

/// Largest x with u(x) >= θ, linearly interpolated towards the next cell.
std::optional<double> track_front(const Field& field, double theta);

/// Observer building one trace per threshold. Positions at or beyond
/// `guard_x` are not recorded.
class FrontTracker {
public:
    explicit FrontTracker(std::vector<double> thetas, double guard_x = kInfinity);
    Observer observer();
    const std::vector<FrontTrace>& traces() const { return *traces_; }
    const FrontTrace& trace(double theta) const;

private:
    double guard_x_;
    std::shared_ptr<std::vector<FrontTrace>> traces_;
};

struct SpeedFit {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::size_t points = 0;
};

/// Least-squares line through the trace points with t in [t_lo, t_hi].
SpeedFit fit_speed(const FrontTrace& trace, double t_lo, double t_hi);

/// max(10/K̄, 0.2 t_end).
double burn_in_time(double kernel_mass, double t_end);

struct Envelope {
    std::vector<double> t;
    std::vector<double> upper;
    std::vector<double> lower;
    /// λ branch used for the upper envelope (min(λ_init, λ*)).
    double lambda_upper = 0.0;
    double lower_slope = 0.0;
    /// (L(λ) + ⌊μ⌋)/λ at the upper branch.
    double upper_mean_slope = 0.0;
    bool slow_decay = false;
};

/// U(t) = ∫_0^t c+(λ)(s) ds and L(t) = c_low t. Pass nullopt for compactly
/// supported initial data.
Envelope theoretical_envelope(const SpeedCurve& curve, const Coefficient& mu, std::optional<double> lambda_init,
                              std::span<const double> t_grid);

struct VerdictOptions {
    double eta = 0.0;
    /// Slack for fitted slopes.
    double speed_tolerance = 0.0;
    /// Slack for positions in the upper check.
    double position_tolerance = 0.0;
    double inner_tolerance = 0.05;
    double burn_in = 0.0;
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    bool check_inner = true;
};

struct VerdictCheck {
    std::string name;
    bool passed = false;
    std::map<std::string, double> numbers;
};

struct Verdict {
    std::vector<VerdictCheck> checks;
    SpeedFit fit;
    bool pass = false;
};

Verdict verdict(const FrontTrace& trace, const Envelope& envelope, const Field& final_field, const VerdictOptions& opts);

/// min u over [x_lo, x_hi] on grid points (1 if the interval holds no grid point).
double min_over(const Field& field, double x_lo, double x_hi);
/// max u over grid points with x >= x0 (0 if none).
double max_beyond(const Field& field, double x0);

}  // namespace nlkpp
