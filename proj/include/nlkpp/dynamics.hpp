#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nlkpp/convolution.hpp"
#include "nlkpp/env.hpp"
#include "nlkpp/kernel.hpp"

namespace nlkpp {

struct Grid {
    double x_min = 0.0;
    double x_max = 1.0;
    int n = 16;
    double dx = 0.0;

    static Grid make(double x_min, double x_max, int n);
    /// Grid from x_min with spacing dx and enough points to reach x_max.
    static Grid with_spacing(double x_min, double x_max, double dx);
    double x(int i) const { return x_min + dx * i; }
    std::size_t size() const { return static_cast<std::size_t>(n); }
};

struct Field {
    Grid grid;
    double t = 0.0;
    std::vector<double> values;

    double max() const;
    double min() const;
    /// Linear interpolation; 0 outside the grid.
    double at(double x) const;
};

struct Logistic {
    Coefficient mu;
};

/// f = μ(t)(1 - H u).
struct LogisticH {
    Coefficient mu;
    double h = 1.0;
};

/// User-supplied f(t, u) with μ(t) = f(t, 0) and a declared Lipschitz constant C.
struct GeneralNonlinearity {
    std::string name;
    Coefficient mu;
    std::function<double(double, double)> f;
    double lipschitz = 0.0;
};

class Nonlinearity {
public:
    using Form = std::variant<Logistic, LogisticH, GeneralNonlinearity>;

    explicit Nonlinearity(Form form);
    static Nonlinearity logistic(Coefficient mu);
    static Nonlinearity logistic_h(Coefficient mu, double h);
    static Nonlinearity general(std::string name, Coefficient mu, std::function<double(double, double)> f,
                                double lipschitz);
    /// f = μ(1-u)/(1+κu); C = sup μ · (1+κ).
    static Nonlinearity saturating(Coefficient mu, double kappa);

    const Form& form() const { return form_; }
    std::string name() const;
    const Coefficient& mu() const;

    double f(double t, double u) const;
    /// out[i] += u[i] * f(t, u[i]).
    void add_reaction(double t, std::span<const double> u, std::span<double> out) const;

    double h0() const { return mu().inf_bound(); }
    double lipschitz() const;
    /// H = C / h0.
    double big_h() const { return lipschitz() / h0(); }
    double sup_mu() const { return mu().sup_abs(); }
    /// Positive zero of u -> f(t, u) (1 for logistic, 1/H for logistic_H).
    double carrying_capacity() const;

    /// Samples (t, u) in [0, t_max] x [0, 1] and checks f(t,0) = μ(t),
    /// μ - C u <= f <= μ and monotonicity in u. Returns the worst violation.
    double sampled_violation(double t_max, int t_samples = 64, int u_samples = 64) const;

private:
    Form form_;
};

struct InitialData {
    enum class Kind { compact_bump, plateau_tail, pure_exponential, custom };
    Kind kind = Kind::compact_bump;
    double a = 10.0;      // support length (bump) or tail start (plateau)
    double alpha = 1.0;   // plateau ramp length
    double p = 0.5;       // peak / prefactor
    double lambda = 1.0;  // tail decay rate
    double shift = 0.0;
    // Custom profile samples (x, value), linearly interpolated, zero outside.
    std::vector<double> custom_x;
    std::vector<double> custom_values;

    static InitialData compact_bump(double a, double p, double shift = 0.0);
    static InitialData plateau_tail(double alpha, double a, double p, double lambda, double shift = 0.0);
    static InitialData pure_exponential(double p, double lambda, double shift = 0.0);
    static InitialData custom(std::vector<double> xs, std::vector<double> values, double shift = 0.0);

    std::string kind_name() const;
    /// Profile at x before the shift is applied.
    double profile(double x) const;
    double operator()(double x) const { return profile(x - shift); }
    /// Decay rate of the right tail; nullopt for compactly supported data.
    std::optional<double> tail_rate() const;
    void validate() const;
};

Field make_initial(const InitialData& init, const Grid& grid);

struct SolverOptions {
    Boundary boundary = Boundary::zero_pad;
    // Spectral round-off (~1e-16) ahead of a front is amplified like e^{μt} by the
    // unstable state u = 0, so long front runs use the direct sum.
    ConvolutionMethod method = ConvolutionMethod::direct;
};

/// Method of lines for ∂t u = K∗u - K̄u + u f(t,u). The discrete mass Σw_j
/// replaces K̄ so that constants are exact equilibria in periodic mode.
class Solver {
public:
    Solver(KernelSpec kernel, Nonlinearity nl, Grid grid, SolverOptions opts = {});
    ~Solver();
    Solver(Solver&&) noexcept;
    Solver& operator=(Solver&&) noexcept;

    const KernelSpec& kernel() const { return kernel_; }
    const Nonlinearity& nonlinearity() const { return nl_; }
    const Grid& grid() const { return grid_; }
    const Stencil& stencil() const { return stencil_; }
    const SolverOptions& options() const { return opts_; }

    /// 0.5 / (K̄ + ‖μ‖∞).
    double max_stable_dt() const;

    void convolve(std::span<const double> u, std::span<double> out);
    void rhs(double t, std::span<const double> u, std::span<double> out);
    /// One RK4 step with projection to [0, 1]. Returns the largest excursion
    /// outside [0, 1] seen before projection.
    double step(Field& field, double dt);

private:
    KernelSpec kernel_;
    Nonlinearity nl_;
    Grid grid_;
    SolverOptions opts_;
    Stencil stencil_;
    std::unique_ptr<SpectralConvolver> spectral_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

using Observer = std::function<void(const Field&)>;

struct RunOptions {
    double t_end = 0.0;
    double dt = 0.05;
    /// Observers fire every `stride` steps, plus at t = 0 and at t_end.
    int stride = 1;
    bool guard = true;
    /// Width of the guard band in effective kernel widths (support where K > 1e-16 peak).
    double guard_supports = 1.0;
    double guard_threshold = 1e-10;
};

struct RunSummary {
    Field final_field;
    long steps = 0;
    /// Largest u seen inside the guard zone.
    double max_boundary_contamination = 0.0;
    double max_projection_excursion = 0.0;
    /// max over steps of max_x |u(t+dt) - u(t)| / dt.
    double max_time_lipschitz = 0.0;
};

/// Throws domain_exhausted when u exceeds the guard threshold within
/// guard_supports effective kernel widths of the right boundary.
RunSummary run(Solver& solver, Field initial, const RunOptions& opts, std::span<const Observer> observers = {});

/// Records every observed field.
class SnapshotRecorder {
public:
    Observer observer();
    const std::vector<Field>& snapshots() const { return *snaps_; }

private:
    std::shared_ptr<std::vector<Field>> snaps_ = std::make_shared<std::vector<Field>>();
};

}  // namespace nlkpp
