#include "nlkpp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlkpp/error.hpp"

namespace nlkpp {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ---------------------------------------------------------------- grid, field

Grid Grid::make(double x_min, double x_max, int n) {
    if (n < 16) fail(ErrorKind::invalid_parameters, "grid needs at least 16 points");
    if (!(x_max > x_min)) fail(ErrorKind::invalid_parameters, "grid needs x_max > x_min");
    return Grid{x_min, x_max, n, (x_max - x_min) / (n - 1)};
}

Grid Grid::with_spacing(double x_min, double x_max, double dx) {
    if (!(dx > 0.0)) fail(ErrorKind::invalid_parameters, "grid spacing must be positive");
    const int n = static_cast<int>(std::ceil((x_max - x_min) / dx - 1e-9)) + 1;
    return make(x_min, x_min + dx * (n - 1), n);
}

double Field::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
double Field::min() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }

double Field::at(double x) const {
    const double s = (x - grid.x_min) / grid.dx;
    if (s < 0.0 || s > grid.n - 1) return 0.0;
    const auto i = std::min(static_cast<int>(s), grid.n - 2);
    const double w = s - i;
    return (1.0 - w) * values[static_cast<std::size_t>(i)] + w * values[static_cast<std::size_t>(i + 1)];
}

// --------------------------------------------------------------- nonlinearity

Nonlinearity::Nonlinearity(Form form) : form_(std::move(form)) {
    std::visit(Overloaded{
                   [](const Logistic&) {},
                   [](const LogisticH& l) {
                       if (!(l.h >= 1.0)) fail(ErrorKind::invalid_parameters, "logistic_H needs H >= 1");
                   },
                   [](const GeneralNonlinearity& g) {
                       if (!g.f) fail(ErrorKind::invalid_parameters, "general nonlinearity needs a callable");
                       if (!(g.lipschitz > 0.0))
                           fail(ErrorKind::invalid_parameters, "general nonlinearity needs C > 0");
                   },
               },
               form_);
}

Nonlinearity Nonlinearity::logistic(Coefficient mu) { return Nonlinearity(Logistic{std::move(mu)}); }

Nonlinearity Nonlinearity::logistic_h(Coefficient mu, double h) { return Nonlinearity(LogisticH{std::move(mu), h}); }

Nonlinearity Nonlinearity::general(std::string name, Coefficient mu, std::function<double(double, double)> f,
                                   double lipschitz) {
    return Nonlinearity(GeneralNonlinearity{std::move(name), std::move(mu), std::move(f), lipschitz});
}

Nonlinearity Nonlinearity::saturating(Coefficient mu, double kappa) {
    if (!(kappa >= 0.0)) fail(ErrorKind::invalid_parameters, "saturating nonlinearity needs kappa >= 0");
    const double c = mu.sup_abs() * (1.0 + kappa);
    Coefficient m = mu;
    return general(
        "saturating", std::move(mu), [m, kappa](double t, double u) { return m.eval(t) * (1.0 - u) / (1.0 + kappa * u); },
        c);
}

std::string Nonlinearity::name() const {
    return std::visit(Overloaded{
                          [](const Logistic&) { return std::string("logistic"); },
                          [](const LogisticH&) { return std::string("logistic_H"); },
                          [](const GeneralNonlinearity& g) { return g.name; },
                      },
                      form_);
}

const Coefficient& Nonlinearity::mu() const {
    return std::visit([](const auto& v) -> const Coefficient& { return v.mu; }, form_);
}

double Nonlinearity::f(double t, double u) const {
    return std::visit(Overloaded{
                          [&](const Logistic& l) { return l.mu.eval(t) * (1.0 - u); },
                          [&](const LogisticH& l) { return l.mu.eval(t) * (1.0 - l.h * u); },
                          [&](const GeneralNonlinearity& g) { return g.f(t, u); },
                      },
                      form_);
}

void Nonlinearity::add_reaction(double t, std::span<const double> u, std::span<double> out) const {
    const std::size_t n = u.size();
    std::visit(Overloaded{
                   [&](const Logistic& l) {
                       const double m = l.mu.eval(t);
                       for (std::size_t i = 0; i < n; ++i) out[i] += m * u[i] * (1.0 - u[i]);
                   },
                   [&](const LogisticH& l) {
                       const double m = l.mu.eval(t);
                       for (std::size_t i = 0; i < n; ++i) out[i] += m * u[i] * (1.0 - l.h * u[i]);
                   },
                   [&](const GeneralNonlinearity& g) {
                       for (std::size_t i = 0; i < n; ++i) out[i] += u[i] * g.f(t, u[i]);
                   },
               },
               form_);
}

double Nonlinearity::lipschitz() const {
    return std::visit(Overloaded{
                          [](const Logistic& l) { return l.mu.sup_abs(); },
                          [](const LogisticH& l) { return l.mu.sup_abs() * l.h; },
                          [](const GeneralNonlinearity& g) { return g.lipschitz; },
                      },
                      form_);
}

double Nonlinearity::carrying_capacity() const {
    return std::visit(Overloaded{
                          [](const Logistic&) { return 1.0; },
                          [](const LogisticH& l) { return 1.0 / l.h; },
                          [](const GeneralNonlinearity&) { return 1.0; },
                      },
                      form_);
}

double Nonlinearity::sampled_violation(double t_max, int t_samples, int u_samples) const {
    const double horizon = std::min(t_max, mu().horizon());
    const double c = lipschitz();
    double worst = 0.0;
    for (int i = 0; i < t_samples; ++i) {
        const double t = t_samples == 1 ? 0.0 : horizon * i / (t_samples - 1);
        const double m = mu().eval(t);
        worst = std::max(worst, std::abs(f(t, 0.0) - m));
        double previous = f(t, 0.0);
        for (int k = 0; k < u_samples; ++k) {
            const double u = static_cast<double>(k) / (u_samples - 1);
            const double v = f(t, u);
            worst = std::max({worst, v - m, (m - c * u) - v, v - previous});
            previous = v;
        }
    }
    return worst;
}

// --------------------------------------------------------------- initial data

InitialData InitialData::compact_bump(double a, double p, double shift) {
    InitialData d;
    d.kind = Kind::compact_bump;
    d.a = a;
    d.p = p;
    d.shift = shift;
    d.validate();
    return d;
}

InitialData InitialData::plateau_tail(double alpha, double a, double p, double lambda, double shift) {
    InitialData d;
    d.kind = Kind::plateau_tail;
    d.alpha = alpha;
    d.a = a;
    d.p = p;
    d.lambda = lambda;
    d.shift = shift;
    d.validate();
    return d;
}

InitialData InitialData::pure_exponential(double p, double lambda, double shift) {
    InitialData d;
    d.kind = Kind::pure_exponential;
    d.p = p;
    d.lambda = lambda;
    d.shift = shift;
    d.validate();
    return d;
}

InitialData InitialData::custom(std::vector<double> xs, std::vector<double> values, double shift) {
    InitialData d;
    d.kind = Kind::custom;
    d.custom_x = std::move(xs);
    d.custom_values = std::move(values);
    d.shift = shift;
    d.validate();
    return d;
}

std::string InitialData::kind_name() const {
    switch (kind) {
        case Kind::compact_bump: return "compact_bump";
        case Kind::plateau_tail: return "plateau_tail";
        case Kind::pure_exponential: return "pure_exponential";
        case Kind::custom: return "custom";
    }
    return "unknown";
}

void InitialData::validate() const {
    const auto bad = [](const std::string& m) { fail(ErrorKind::invalid_parameters, m); };
    switch (kind) {
        case Kind::compact_bump:
            if (!(a > 0.0)) bad("compact_bump needs A > 0");
            if (!(p > 0.0 && p < 1.0)) bad("compact_bump needs 0 < p < 1");
            break;
        case Kind::plateau_tail:
            if (!(alpha > 0.0) || !(alpha < a)) bad("plateau_tail needs 0 < alpha < A");
            if (!(p > 0.0 && p < 1.0)) bad("plateau_tail needs 0 < p < 1");
            if (!(lambda > 0.0)) bad("plateau_tail needs lambda > 0");
            break;
        case Kind::pure_exponential:
            if (!(p > 0.0 && p < 1.0)) bad("pure_exponential needs 0 < p < 1");
            if (!(lambda > 0.0)) bad("pure_exponential needs lambda > 0");
            break;
        case Kind::custom:
            if (custom_x.size() < 2 || custom_x.size() != custom_values.size())
                bad("custom initial data needs matching x and value arrays of length >= 2");
            if (!std::is_sorted(custom_x.begin(), custom_x.end())) bad("custom initial data x must be sorted");
            for (double v : custom_values)
                if (!(v >= 0.0 && v <= 1.0)) bad("custom initial data must lie in [0, 1]");
            break;
    }
}

double InitialData::profile(double x) const {
    switch (kind) {
        case Kind::compact_bump: {
            if (x <= 0.0 || x >= a) return 0.0;
            const double half = 0.5 * a;
            return p * (1.0 - std::abs(x - half) / half);
        }
        case Kind::plateau_tail: {
            if (x <= 0.0) return 0.0;
            const double beta = p * std::exp(-lambda * a);
            if (x < alpha) return beta * x / alpha;
            if (x < a) return beta;
            return p * std::exp(-lambda * x);
        }
        case Kind::pure_exponential: {
            if (x <= 0.0) return 0.0;
            if (x < 1.0) return p * std::exp(-lambda) * x;
            return p * std::exp(-lambda * x);
        }
        case Kind::custom: {
            if (x < custom_x.front() || x > custom_x.back()) return 0.0;
            const auto it = std::upper_bound(custom_x.begin(), custom_x.end(), x);
            if (it == custom_x.end()) return custom_values.back();
            const auto i = static_cast<std::size_t>(it - custom_x.begin());
            const double w = (x - custom_x[i - 1]) / (custom_x[i] - custom_x[i - 1]);
            return (1.0 - w) * custom_values[i - 1] + w * custom_values[i];
        }
    }
    return 0.0;
}

std::optional<double> InitialData::tail_rate() const {
    if (kind == Kind::plateau_tail || kind == Kind::pure_exponential) return lambda;
    return std::nullopt;
}

Field make_initial(const InitialData& init, const Grid& grid) {
    init.validate();
    Field f{grid, 0.0, std::vector<double>(grid.size())};
    for (int i = 0; i < grid.n; ++i) f.values[static_cast<std::size_t>(i)] = init(grid.x(i));
    return f;
}

// --------------------------------------------------------------------- solver

namespace {
constexpr double kUnderflowFloor = 1e-280;
}

Solver::Solver(KernelSpec kernel, Nonlinearity nl, Grid grid, SolverOptions opts)
    : kernel_(std::move(kernel)),
      nl_(std::move(nl)),
      grid_(grid),
      opts_(opts),
      stencil_(make_stencil(kernel_, grid.dx)) {
    if (opts_.method == ConvolutionMethod::spectral)
        spectral_ = std::make_unique<SpectralConvolver>(stencil_, grid_.size(), opts_.boundary);
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->resize(grid_.size());
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

double Solver::max_stable_dt() const { return 0.5 / (kernel_.mass() + nl_.sup_mu()); }

void Solver::convolve(std::span<const double> u, std::span<double> out) {
    switch (opts_.method) {
        case ConvolutionMethod::direct_serial: convolve_direct_serial(stencil_, u, out, opts_.boundary); break;
        case ConvolutionMethod::direct: convolve_direct(stencil_, u, out, opts_.boundary); break;
        case ConvolutionMethod::spectral: spectral_->apply(u, out); break;
    }
}

void Solver::rhs(double t, std::span<const double> u, std::span<double> out) {
    convolve(u, out);
    const double kbar = stencil_.discrete_mass;
    for (std::size_t i = 0; i < u.size(); ++i) out[i] -= kbar * u[i];
    nl_.add_reaction(t, u, out);
}

double Solver::step(Field& field, double dt) {
    if (!(dt > 0.0)) fail(ErrorKind::invalid_parameters, "time step must be positive");
    if (dt > max_stable_dt() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "dt = " << dt << " exceeds the stable step 0.5/(K̄ + ‖μ‖∞) = " << max_stable_dt();
        fail(ErrorKind::stability, os.str());
    }
    if (field.values.size() != grid_.size()) fail(ErrorKind::invalid_parameters, "field does not match solver grid");
    auto& u = field.values;
    const std::size_t n = u.size();
    const double t = field.t;

    rhs(t, u, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k1_[i];
    rhs(t + 0.5 * dt, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k2_[i];
    rhs(t + 0.5 * dt, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + dt * k3_[i];
    rhs(t + dt, tmp_, k4_);

    double excursion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = u[i] + dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        excursion = std::max({excursion, -v, v - 1.0});
        // Values this small only feed subnormal arithmetic; zeroing them lowers u,
        // which keeps the discrete solution on the sub-solution side.
        u[i] = v < kUnderflowFloor ? 0.0 : std::min(v, 1.0);
    }
    field.t = t + dt;
    return excursion;
}

// ------------------------------------------------------------------------ run

RunSummary run(Solver& solver, Field initial, const RunOptions& opts, std::span<const Observer> observers) {
    if (!(opts.t_end >= 0.0)) fail(ErrorKind::invalid_parameters, "t_end must be nonnegative");
    if (opts.stride < 1) fail(ErrorKind::invalid_parameters, "observer stride must be >= 1");
    if (!(opts.dt > 0.0)) fail(ErrorKind::invalid_parameters, "dt must be positive");

    RunSummary summary{std::move(initial), 0, 0.0, 0.0, 0.0};
    Field& field = summary.final_field;
    const Grid& grid = solver.grid();
    const double t0 = field.t;

    const bool guarded = opts.guard && solver.options().boundary == Boundary::zero_pad;
    const double guard_start = grid.x_max - opts.guard_supports * solver.kernel().effective_support().width();
    const auto guard_index =
        static_cast<std::size_t>(std::clamp(std::ceil((guard_start - grid.x_min) / grid.dx), 0.0, double(grid.n)));
    const auto check_guard = [&] {
        if (!guarded) return;
        double worst = 0.0;
        for (std::size_t i = guard_index; i < field.values.size(); ++i) worst = std::max(worst, field.values[i]);
        summary.max_boundary_contamination = std::max(summary.max_boundary_contamination, worst);
        if (worst >= opts.guard_threshold) {
            std::ostringstream os;
            os << "solution reached the guard zone x >= " << guard_start << " at t = " << field.t
               << " (u = " << worst << "); widen the grid";
            fail(ErrorKind::domain_exhausted, os.str());
        }
    };
    const auto notify = [&] {
        for (const auto& o : observers) o(field);
    };

    check_guard();
    notify();
    const long steps = opts.t_end == 0.0 ? 0 : static_cast<long>(std::ceil(opts.t_end / opts.dt - 1e-9));
    std::vector<double> previous;
    bool notified_last = true;
    for (long k = 1; k <= steps; ++k) {
        const double target = k == steps ? t0 + opts.t_end : t0 + k * opts.dt;
        const double h = target - field.t;
        previous = field.values;
        summary.max_projection_excursion = std::max(summary.max_projection_excursion, solver.step(field, h));
        field.t = target;
        double rate = 0.0;
        for (std::size_t i = 0; i < previous.size(); ++i)
            rate = std::max(rate, std::abs(field.values[i] - previous[i]));
        summary.max_time_lipschitz = std::max(summary.max_time_lipschitz, rate / h);
        check_guard();
        notified_last = k % opts.stride == 0;
        if (notified_last) notify();
    }
    if (!notified_last) notify();
    summary.steps = steps;
    return summary;
}

Observer SnapshotRecorder::observer() {
    auto snaps = snaps_;
    return [snaps](const Field& f) { snaps->push_back(f); };
}

}  // namespace nlkpp
