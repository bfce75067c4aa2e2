#include "nlkpp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nlkpp/error.hpp"

namespace nlkpp {

// ----------------------------------------------------------------- candidates

Candidate exp_supersolution(const SpeedCurve& curve, const Coefficient& mu, std::optional<double> lambda_init,
                            const Field& initial) {
    if (!curve.star_interior) fail(ErrorKind::unsupported, "super-solution needs an interior minimizer");
    const double lambda = lambda_init ? std::min(*lambda_init, curve.lambda_star) : curve.lambda_star;
    double a = 0.0;
    for (int i = 0; i < initial.grid.n; ++i) {
        const double u = initial.values[static_cast<std::size_t>(i)];
        if (u > 0.0) a = std::max(a, u * std::exp(lambda * initial.grid.x(i)));
    }
    if (a == 0.0) a = 1.0;
    a *= 1.0 + 1e-12;
    const double big_l = curve.kernel.big_l(lambda);

    Candidate c;
    c.kind = "supersolution_exp";
    c.side = Candidate::Side::super;
    c.frame = [=](double t) { return (big_l * t + mu.integral(0.0, t)) / lambda; };
    c.profile = [=](double, double z) { return a * std::exp(-lambda * z); };
    c.time_derivative = [=](double t, double z) { return (big_l + mu.eval(t)) * a * std::exp(-lambda * z); };
    c.scale = a;
    c.parameters = {{"A", a}, {"lambda", lambda}};
    return c;
}

Candidate cosine_subsolution(const KernelSpec& kernel, double gamma, double r, double b, double eta,
                             const Adjuster& a) {
    if (!(r > 0.0) || !(b > 0.0) || !(eta > 0.0) || !(gamma > 0.0))
        fail(ErrorKind::invalid_parameters, "cosine sub-solution needs positive gamma, R, B, eta");
    const double speed = c_truncated(kernel, gamma, r, b);
    const double k = std::numbers::pi / (2.0 * r);
    // Peak of e^{-γz} cos(kz) on (-R, R); the profile is written relative to it
    // so that large R never overflows.
    const double z_star = -std::atan(gamma / k) / k;
    const double cos_star = std::cos(k * z_star);
    const auto shape = [=](double z) { return std::exp(-gamma * (z - z_star)) / cos_star; };

    Candidate c;
    c.kind = "subsolution_cosine";
    c.side = Candidate::Side::sub;
    c.frame = [=](double t) { return speed * t; };
    c.profile = [=](double t, double z) {
        if (std::abs(z) >= r) return 0.0;
        return eta * std::exp(a.value(t)) * shape(z) * std::cos(k * z);
    };
    c.time_derivative = [=](double t, double z) {
        if (std::abs(z) >= r) return 0.0;
        const double amp = eta * std::exp(a.value(t)) * shape(z);
        const double w = amp * std::cos(k * z);
        const double wz = amp * (-gamma * std::cos(k * z) - k * std::sin(k * z));
        return a.derivative(t) * w - speed * wz;
    };
    c.kinks = {-r, r};
    c.scale = eta * std::exp(a.sup_abs);
    c.parameters = {{"gamma", gamma}, {"R", r}, {"B", b}, {"eta", eta}, {"c_RB", speed}, {"a_sup", a.sup_abs}};
    return c;
}

Candidate two_exp_subsolution(const KernelSpec& kernel, const Coefficient& mu, double lambda, double h, double b1,
                              const Adjuster& a) {
    if (!(lambda > 0.0) || !(h > 0.0) || !(b1 > 0.0))
        fail(ErrorKind::invalid_parameters, "two-exponential sub-solution needs positive lambda, h, B1");
    if (!(lambda + h < kernel.abscissa()))
        fail(ErrorKind::domain, "two-exponential sub-solution needs lambda + h < sigma(K)");
    const double big_l = kernel.big_l(lambda);

    Candidate c;
    c.kind = "subsolution_two_exp";
    c.side = Candidate::Side::sub;
    c.frame = [=](double t) { return (big_l * t + mu.integral(0.0, t)) / lambda + a.value(t); };
    const auto parts = [=](double t, double z) {
        const double at = a.value(t);
        return std::pair{std::exp(-lambda * (z + at)), std::exp(-lambda * at + b1 - (lambda + h) * z)};
    };
    c.profile = [=](double t, double z) {
        const auto [e1, e2] = parts(t, z);
        return std::max(0.0, e1 - e2);
    };
    c.time_derivative = [=](double t, double z) {
        const auto [e1, e2] = parts(t, z);
        if (e1 - e2 <= 0.0) return 0.0;
        const double g = big_l + mu.eval(t);
        return e1 * g - e2 * ((lambda + h) * g / lambda + h * a.derivative(t));
    };
    c.kinks = {b1 / h};
    // sup of φ over ξ: attained where the ratio of the two terms is λ/(λ+h).
    const double s = lambda / (lambda + h);
    const double xi = (b1 - std::log(s)) / h;
    c.scale = std::exp(-lambda * xi + lambda * a.sup_abs) * (1.0 - s);
    c.parameters = {{"lambda", lambda}, {"h", h}, {"B1", b1}, {"B0", 0.0}, {"a_sup", a.sup_abs}};
    return c;
}

// ------------------------------------------------------------------- residual

ResidualReport residual(const KernelSpec& kernel, const Nonlinearity& nl, const Candidate& cand,
                        const ResidualOptions& opts) {
    if (opts.nt < 1 || opts.nz < 2 || !(opts.z_hi > opts.z_lo) || !(opts.t_hi >= opts.t_lo))
        fail(ErrorKind::invalid_parameters, "invalid residual sampling window");
    const bool super = cand.side == Candidate::Side::super;
    const double kbar = kernel.mass();
    const long nt = opts.nt;
    const long nz = opts.nz;
    const long total = nt * nz;
    std::vector<double> values(static_cast<std::size_t>(total));
    std::vector<double> errors(static_cast<std::size_t>(total));

    const auto t_at = [&](long i) { return nt == 1 ? opts.t_lo : opts.t_lo + (opts.t_hi - opts.t_lo) * i / (nt - 1); };
    const auto z_at = [&](long j) { return opts.z_lo + (opts.z_hi - opts.z_lo) * j / (nz - 1); };

#pragma omp parallel for schedule(dynamic, 16)
    for (long idx = 0; idx < total; ++idx) {
        const double t = t_at(idx / nz);
        const double z = z_at(idx % nz);
        const double w = cand.profile(t, z);
        std::vector<double> breaks;
        breaks.reserve(cand.kinks.size());
        for (double k : cand.kinks) breaks.push_back(z - k);
        double err = 0.0;
        const double conv = kernel.integrate_against([&](double y) { return cand.profile(t, z - y); }, breaks, &err);
        const double f = nl.f(t, std::clamp(w, 0.0, 1.0));
        values[static_cast<std::size_t>(idx)] = cand.time_derivative(t, z) - (conv - kbar * w) - w * f;
        errors[static_cast<std::size_t>(idx)] = err;
    }

    ResidualReport r;
    r.kind = cand.kind;
    r.side = super ? "super" : "sub";
    r.t_lo = opts.t_lo;
    r.t_hi = opts.t_hi;
    r.z_lo = opts.z_lo;
    r.z_hi = opts.z_hi;
    r.samples = total;
    r.scale = cand.scale;
    r.tolerance = (opts.rel_tol > 0.0 ? opts.rel_tol : (super ? 1e-8 : 1e-6)) * cand.scale;
    r.extremum = super ? kInfinity : -kInfinity;
    for (long idx = 0; idx < total; ++idx) {
        const double v = values[static_cast<std::size_t>(idx)];
        r.max_quadrature_error = std::max(r.max_quadrature_error, errors[static_cast<std::size_t>(idx)]);
        if (super ? v < r.extremum : v > r.extremum) {
            r.extremum = v;
            r.at_t = t_at(idx / nz);
            r.at_x = cand.frame(r.at_t) + z_at(idx % nz);
        }
    }
    r.passed = super ? r.extremum >= -r.tolerance : r.extremum <= r.tolerance;
    // A passing sign with quadrature noise above the tolerance proves nothing.
    r.inconclusive = r.max_quadrature_error > std::max(r.tolerance, 1e-8 * cand.scale);
    if (r.inconclusive) r.passed = false;
    return r;
}

std::string to_string(CertificateStatus s) {
    switch (s) {
        case CertificateStatus::certified: return "certified";
        case CertificateStatus::not_certified: return "not_certified";
        case CertificateStatus::violated: return "violated";
    }
    return "unknown";
}

ResidualOptions default_window(const Candidate& cand, int nt, int nz, double t_hi) {
    ResidualOptions o;
    o.nt = nt;
    o.nz = nz;
    o.t_hi = t_hi;
    if (cand.kind == "supersolution_exp") {
        const double lambda = cand.parameters.at("lambda");
        const double z_one = std::log(cand.parameters.at("A")) / lambda;
        o.z_lo = z_one - 5.0;
        o.z_hi = z_one + 30.0;
    } else if (cand.kind == "subsolution_cosine") {
        const double r = cand.parameters.at("R");
        o.z_lo = -r - 1.0;
        o.z_hi = r + 1.0;
    } else {
        const double z0 = cand.kinks.front();
        o.z_lo = z0 - 2.0;
        o.z_hi = z0 + 40.0;
    }
    return o;
}

CertificateResult check_candidate(const KernelSpec& kernel, const Nonlinearity& nl, const Candidate& cand,
                                  const ResidualOptions& opts) {
    CertificateResult res;
    res.candidate = cand;
    res.report = residual(kernel, nl, cand, opts);
    res.attempts = 1;
    if (res.report.passed) {
        res.status = CertificateStatus::certified;
        res.message = "residual sign holds on all samples";
    } else if (res.report.inconclusive) {
        res.status = CertificateStatus::not_certified;
        res.message = "quadrature error above tolerance; widen padding";
    } else {
        res.status = CertificateStatus::violated;
        std::ostringstream os;
        os << "residual " << res.report.extremum << " at t = " << res.report.at_t << ", x = " << res.report.at_x
           << " breaks the " << res.report.side << "-solution inequality";
        res.message = os.str();
    }
    return res;
}

// --------------------------------------------------------------------- search

Adjuster cosine_adjuster(const Coefficient& mu) {
    return mean_value(mu) ? Adjuster::from_mean(mu, -1.0) : Adjuster::zero();
}

Adjuster two_exp_adjuster(const Coefficient& mu, double lambda) {
    return mean_value(mu) ? Adjuster::from_mean(mu, 1.0 / lambda) : Adjuster::zero();
}

CertificateResult search_cosine_subsolution(const KernelSpec& kernel, const Nonlinearity& nl,
                                            const SpeedCurve& curve, const CosineSearchOptions& opts) {
    CertificateResult res;
    if (opts.r_min > opts.r_cap) {
        std::ostringstream os;
        os << "requested R >= " << opts.r_min << " exceeds the search cap " << opts.r_cap;
        res.message = os.str();
        return res;
    }
    const double gamma = opts.gamma_factor * curve.lambda_star;
    const auto mean = mean_value(nl.mu());
    const double mu_eff = mean ? *mean : nl.mu().inf_bound();
    const double kbar = kernel.mass();
    const double g = gamma * kernel.mgf_derivative(gamma) - kernel.mgf(gamma) + kbar - mu_eff;
    if (!(g < 0.0)) {
        res.message = "no slack: gamma M'(gamma) - L(gamma) >= effective growth rate";
        return res;
    }
    const double limit_speed = kernel.mgf_derivative(gamma);
    const Adjuster a = cosine_adjuster(nl.mu());
    // C η e^{‖a‖} uses half of the slack |g|/2 (the other half absorbs truncation).
    const double eta = 0.25 * std::abs(g) / (nl.lipschitz() * std::exp(a.sup_abs));

    for (double b = opts.b_start; 2.0 * b <= opts.r_cap; b *= 2.0) {
        for (double r = std::max(2.0 * b, opts.r_min); r <= opts.r_cap; r *= 2.0) {
            const double k = std::numbers::pi / (2.0 * r);
            const double breaks[] = {-b, b};
            const double cos_part = kernel.integrate_against(
                [=](double y) { return std::abs(y) <= b ? std::exp(gamma * y) * std::cos(k * y) : 0.0; }, breaks);
            const double speed = c_truncated(kernel, gamma, r, b);
            if (speed < opts.min_speed_fraction * limit_speed) continue;
            const double margin = cos_part - speed * gamma - kbar + mu_eff - nl.lipschitz() * eta * std::exp(a.sup_abs);
            if (margin <= 0.0) continue;
            const Candidate cand = cosine_subsolution(kernel, gamma, r, b, eta, a);
            auto attempt = check_candidate(kernel, nl, cand, default_window(cand, opts.nt, opts.nz, opts.t_hi));
            res.attempts += 1;
            res.report = attempt.report;
            res.candidate = attempt.candidate;
            if (attempt.status == CertificateStatus::certified) {
                res.status = CertificateStatus::certified;
                res.message = attempt.message;
                return res;
            }
        }
    }
    std::ostringstream os;
    os << "no cosine witness with R <= " << opts.r_cap << " after " << res.attempts << " residual checks";
    res.status = CertificateStatus::not_certified;
    res.message = os.str();
    return res;
}

double default_two_exp_h(const SpeedCurve& curve, double lambda) {
    const double sigma = curve.kernel.abscissa();
    return 0.5 * std::min({lambda, sigma - lambda, curve.lambda_star - lambda});
}

CertificateResult search_two_exp_subsolution(const KernelSpec& kernel, const Nonlinearity& nl, const SpeedCurve& curve,
                                             double lambda, const TwoExpSearchOptions& opts) {
    if (!(lambda > 0.0 && lambda < curve.lambda_star))
        fail(ErrorKind::invalid_parameters, "two-exponential witness needs 0 < lambda < lambda*");
    CertificateResult res;
    const double h = default_two_exp_h(curve, lambda);
    const Adjuster a = two_exp_adjuster(nl.mu(), lambda);
    double b1 = opts.b1_start;
    for (int i = 0; i < opts.b1_steps; ++i, b1 *= opts.b1_factor) {
        const Candidate cand = two_exp_subsolution(kernel, nl.mu(), lambda, h, b1, a);
        auto attempt = check_candidate(kernel, nl, cand, default_window(cand, opts.nt, opts.nz, opts.t_hi));
        res.attempts += 1;
        res.report = attempt.report;
        res.candidate = attempt.candidate;
        if (attempt.status == CertificateStatus::certified) {
            res.status = CertificateStatus::certified;
            res.message = attempt.message;
            return res;
        }
    }
    res.status = CertificateStatus::not_certified;
    res.message = "no B1 on the search grid gave a valid two-exponential witness";
    return res;
}

// ----------------------------------------------------------------- comparison

ComparisonReport comparison_test(Solver& solver, const Field& low, const Field& high, double t_end, double dt) {
    if (low.values.size() != high.values.size()) fail(ErrorKind::invalid_input, "ordered pair on different grids");
    for (std::size_t i = 0; i < low.values.size(); ++i)
        if (low.values[i] > high.values[i]) {
            std::ostringstream os;
            os << "initial data not ordered at x = " << low.grid.x(static_cast<int>(i));
            fail(ErrorKind::invalid_input, os.str());
        }
    ComparisonReport rep;
    rep.pairs = 1;
    Field a = low;
    Field b = high;
    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    double worst = 0.0;
    for (long k = 1; k <= steps; ++k) {
        const double h = std::min(dt, t_end - a.t);
        solver.step(a, h);
        solver.step(b, h);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            const double d = a.values[i] - b.values[i];
            if (d > worst) {
                worst = d;
                rep.worst_t = a.t;
            }
        }
    }
    rep.max_violation = worst;
    rep.per_pair = {worst};
    rep.worst_pair = 0;
    rep.passed = worst <= 1e-10;
    return rep;
}

namespace {

Field random_profile(const Grid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 3);
    Field f{grid, 0.0, std::vector<double>(grid.size(), 0.0)};
    const double span = grid.x_max - grid.x_min;
    const int bumps = count(rng);
    for (int b = 0; b < bumps; ++b) {
        const double len = 2.0 + 18.0 * unit(rng);
        const double peak = 0.05 + 0.9 * unit(rng);
        const double start = grid.x_min + span * (0.2 + 0.15 * unit(rng));
        const auto bump = InitialData::compact_bump(len, peak, start);
        for (int i = 0; i < grid.n; ++i) {
            auto& v = f.values[static_cast<std::size_t>(i)];
            v = std::min(1.0, v + bump(grid.x(i)));
        }
    }
    return f;
}

}  // namespace

ComparisonReport random_comparison_test(Solver& solver, int count, std::uint64_t seed, double t_end, double dt) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ComparisonReport total;
    for (int p = 0; p < count; ++p) {
        const Field high = random_profile(solver.grid(), rng);
        const Field other = random_profile(solver.grid(), rng);
        const double factor = 0.3 + 0.7 * unit(rng);
        Field low = high;
        for (std::size_t i = 0; i < low.values.size(); ++i)
            low.values[i] = factor * std::min(high.values[i], other.values[i]);
        const auto r = comparison_test(solver, low, high, t_end, dt);
        total.per_pair.push_back(r.max_violation);
        if (p == 0 || r.max_violation > total.max_violation) {
            total.max_violation = r.max_violation;
            total.worst_t = r.worst_t;
            total.worst_pair = p;
        }
    }
    total.pairs = count;
    total.passed = total.max_violation <= 1e-10;
    return total;
}

// ----------------------------------------------------------------- positivity

PositivityReport positivity_test(Solver& solver, const Field& initial, double t_probe, double dt) {
    PositivityReport rep;
    rep.t_probe = t_probe;
    const Grid& g = initial.grid;
    int first = -1, last = -1;
    for (int i = 0; i < g.n; ++i)
        if (initial.values[static_cast<std::size_t>(i)] > 0.0) {
            if (first < 0) first = i;
            last = i;
        }
    if (first < 0) {
        rep.skipped = true;
        rep.passed = true;
        return rep;
    }
    rep.support_lo = g.x(first);
    rep.support_hi = g.x(last);
    const Stencil& s = solver.stencil();
    const double rate = solver.kernel().mass() + solver.nonlinearity().sup_mu();
    const long hops = t_probe > 0.0 ? static_cast<long>(std::ceil(t_probe * rate)) : 0;
    const int lo = std::max(0, first - static_cast<int>(hops * std::max(0, -s.lo)));
    const int hi = std::min(g.n - 1, last + static_cast<int>(hops * std::max(0, s.hi)));
    rep.reach_lo = g.x(lo);
    rep.reach_hi = g.x(hi);

    Field f = initial;
    if (t_probe > 0.0) {
        RunOptions ro;
        ro.t_end = t_probe;
        ro.dt = dt;
        ro.guard = false;
        f = run(solver, initial, ro).final_field;
    }
    rep.min_value = kInfinity;
    for (int i = lo; i <= hi; ++i) {
        const double v = f.values[static_cast<std::size_t>(i)];
        // Without time to spread, only the initial support is required positive.
        if (t_probe == 0.0 && initial.values[static_cast<std::size_t>(i)] <= 0.0) continue;
        ++rep.cells_checked;
        rep.min_value = std::min(rep.min_value, v);
        if (!(v > 0.0)) ++rep.nonpositive;
    }
    rep.passed = rep.nonpositive == 0;
    return rep;
}

// ---------------------------------------------------------------- persistence

PersistenceReport persistence_diagnostics(const std::vector<Field>& snapshots, const FrontTrace& trace,
                                          const std::vector<double>& ks) {
    if (snapshots.empty()) fail(ErrorKind::insufficient_data, "persistence diagnostics need snapshots");
    PersistenceReport rep;
    rep.window_lo = 0.5 * snapshots.back().t;
    rep.h1 = kInfinity;
    rep.h3 = kInfinity;
    for (double k : ks) rep.conclusion[k] = kInfinity;
    for (const auto& f : snapshots) {
        if (f.t < rep.window_lo) continue;
        rep.h1 = std::min(rep.h1, f.at(0.0));
        const auto it = std::find_if(trace.points.begin(), trace.points.end(),
                                     [&](const auto& p) { return std::abs(p.first - f.t) < 1e-9; });
        if (it == trace.points.end()) continue;
        const double x = it->second;
        rep.h3 = std::min(rep.h3, f.at(x));
        for (double k : ks) {
            auto& slot = rep.conclusion[k];
            slot = std::min({slot, f.at(0.0), min_over(f, 0.0, k * x)});
        }
    }
    return rep;
}

}  // namespace nlkpp
