#include "nlkpp/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "nlkpp/dynamics.hpp"
#include "nlkpp/fronts.hpp"
#include "nlkpp/verify.hpp"

namespace nlkpp {

namespace fs = std::filesystem;
using io::json;
using io::number;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::assumption_violation:
        case ErrorKind::no_minorant:
            return exit_assumption;
        default:
            return exit_runtime_error;
    }
}

namespace {

/// Lower rank wins when several sub-results disagree.
int severity_rank(int code) {
    switch (code) {
        case exit_runtime_error: return 0;
        case exit_assumption: return 1;
        case exit_violated: return 2;
        case exit_not_certified: return 3;
        default: return 4;
    }
}

int combine(int a, int b) { return severity_rank(a) <= severity_rank(b) ? a : b; }

json header(const Scenario& s, const std::string& verb) {
    return {{"scenario", s.name},
            {"verb", verb},
            {"kernel", io::kernel_to_json(s.kernel)},
            {"coefficient", io::coefficient_to_json(s.coefficient)},
            {"nonlinearity", s.nonlinearity},
            {"seed", s.seed}};
}

CommandResult finish(const Scenario& s, json summary, int code, std::string message) {
    summary["exit_code"] = code;
    summary["status"] = message;
    io::write_json(s.output / "summary.json", summary);
    return {code, std::move(summary), std::move(message)};
}

SpeedCurve speed_curve(const Scenario& s, const GrowthAnalysis& g) {
    MinimizeOptions mo;
    mo.sample_count = s.speeds.lambda_grid;
    return minimize_speed(s.kernel, g.mu_least_mean, mo);
}

json minorant_summary(const Scenario& s) {
    const Interval support = s.kernel.effective_support(1e-12);
    double delta = s.speeds.minorant_delta;
    if (!(delta > 0.0)) delta = std::min(1.0, 0.5 * std::min(-support.lo, support.hi));
    const double m = std::isnan(s.speeds.minorant_m) ? s.coefficient.inf_bound() : s.speeds.minorant_m;
    try {
        const MinorantKernel k = minorant(s.kernel, delta);
        return {{"delta", delta}, {"apex", k.apex}, {"mass", k.mass()}, {"m", m}, {"c0", c_autonomous(k, m)}};
    } catch (const Error& e) {
        return {{"delta", delta}, {"m", m}, {"c0", nullptr}, {"error", e.what()}};
    }
}

json ladder_summary(const Scenario& s, const SpeedCurve& curve) {
    json rows = json::array();
    if (!curve.star_interior) return rows;
    for (int k = 0; k <= 6; ++k) {
        const double b = std::ldexp(1.0, k);
        rows.push_back({{"B", b}, {"R", 2.0 * b}, {"c_RB", c_truncated(s.kernel, curve.lambda_star, 2.0 * b, b)}});
    }
    return rows;
}

/// Shared front matter for the verbs that need the speed curve. Returns
/// nullopt (after writing the failure summary) when an assumption fails.
std::optional<SpeedCurve> prepare(const Scenario& s, json& summary, CommandResult& failure) {
    fs::create_directories(s.output);
    const GrowthAnalysis g = analyze_growth(s);
    summary["least_mean"] = io::to_json(g.estimate);
    summary["least_mean"]["exact_mean"] = g.exact_mean;
    summary["mu_least_mean"] = g.mu_least_mean;
    summary["assumptions"] = io::to_json(g.assumptions);
    if (!g.assumptions.all_passed()) {
        std::string failed;
        for (const auto& c : g.assumptions.checks)
            if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.statement;
        failure = finish(s, summary, exit_assumption, "assumption failed: " + failed);
        return std::nullopt;
    }
    return speed_curve(s, g);
}

}  // namespace

GrowthAnalysis analyze_growth(const Scenario& s) {
    GrowthAnalysis g;
    const double horizon = s.coefficient.horizon();
    double t_max = s.least_mean.t_max;
    double s_max = s.least_mean.s_max;
    if (t_max + s_max > horizon) {
        // Shrink both proportionally to fit the tabulated horizon.
        const double f = horizon / (t_max + s_max);
        t_max *= f;
        s_max *= f;
    }
    LeastMeanOptions lo;
    lo.levels = s.least_mean.levels;
    g.estimate = least_mean(s.coefficient, t_max, s_max, lo);
    g.mu_least_mean = g.estimate.value;
    if (const auto mean = mean_value(s.coefficient)) {
        g.mu_least_mean = *mean;
        g.exact_mean = true;
    }
    LeastMeanEstimate used = g.estimate;
    used.value = g.mu_least_mean;
    g.assumptions = check_assumptions(s.kernel, s.coefficient, used);
    return g;
}

CommandResult cmd_speeds(const Scenario& s) {
    json summary = header(s, "speeds");
    CommandResult failure;
    const auto curve = prepare(s, summary, failure);
    if (!curve) return failure;
    io::write_speed_curve_csv(s.output / "speed_curve.csv", *curve);
    summary["speeds"] = io::speed_summary(*curve);
    summary["kernel_mass"] = s.kernel.mass();
    summary["sigma"] = number(s.kernel.abscissa());
    summary["mgf_derivative_at_star"] = s.kernel.mgf_derivative(curve->lambda_star);
    summary["minorant"] = minorant_summary(s);
    summary["c_RB_ladder"] = ladder_summary(s, *curve);
    summary["speed_curve_rows"] = curve->samples.size();
    return finish(s, summary, exit_ok, "ok");
}

CommandResult cmd_simulate(const Scenario& s) {
    json summary = header(s, "simulate");
    CommandResult failure;
    const auto curve = prepare(s, summary, failure);
    if (!curve) return failure;
    summary["speeds"] = io::speed_summary(*curve);

    const Nonlinearity nl = s.make_nonlinearity();
    Solver solver(s.kernel, nl, s.grid, s.solver);
    const Field initial = make_initial(s.initial, s.grid);
    const auto lambda_init = s.initial.tail_rate();
    const double eta = s.fronts.eta_fraction * curve->c_star;
    const double burn_in = burn_in_time(s.kernel.mass(), s.t_end);

    FrontTracker tracker(s.fronts.thresholds);
    SnapshotRecorder recorder;
    // Largest u beyond U(t) + ηt once both the burn-in and the tail settling time have passed.
    constexpr double kTailSettle = 20.0;
    const double tail_from = std::max(burn_in, kTailSettle);
    auto tail = std::make_shared<std::pair<double, double>>(0.0, 0.0);
    std::vector<Observer> observers{tracker.observer()};
    if (s.write_snapshots || s.wants("persistence")) observers.push_back(recorder.observer());
    if (curve->star_interior)
        observers.push_back([&, tail](const Field& f) {
            if (f.t < tail_from) return;
            const double t = f.t;
            const auto env = theoretical_envelope(*curve, s.coefficient, lambda_init, std::span<const double>(&t, 1));
            const double m = max_beyond(f, env.upper.front() + eta * t);
            if (m > tail->first) *tail = {m, t};
        });

    RunOptions ro;
    ro.t_end = s.t_end;
    ro.dt = s.dt;
    ro.stride = s.stride;
    RunSummary rs;
    try {
        rs = run(solver, initial, ro, observers);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::domain_exhausted && e.kind() != ErrorKind::stability) throw;
        std::ostringstream os;
        os << e.what();
        if (e.kind() == ErrorKind::domain_exhausted && curve->star_interior) {
            const double t = s.t_end;
            const auto env = theoretical_envelope(*curve, s.coefficient, lambda_init, std::span<const double>(&t, 1));
            const Interval sup = s.kernel.effective_support(1e-12);
            os << "; suggested x_max >= " << env.upper.front() + eta * t + 5.0 * sup.width() + 20.0;
        } else if (e.kind() == ErrorKind::stability) {
            os << "; suggested dt <= " << solver.max_stable_dt();
        }
        throw Error(e.kind(), os.str());
    }

    io::write_fronts_csv(s.output / "fronts.csv", tracker.traces());
    const FrontTrace& primary = tracker.trace(s.fronts.primary);
    summary["run"] = {{"steps", rs.steps},
                      {"t_end", rs.final_field.t},
                      {"max_boundary_contamination", rs.max_boundary_contamination},
                      {"max_projection_excursion", rs.max_projection_excursion},
                      {"max_time_lipschitz", rs.max_time_lipschitz}};
    if (s.write_snapshots) {
        io::write_snapshots_csv(s.output / "snapshots.csv", recorder.snapshots());
        io::write_snapshots_binary(s.output / "snapshots.bin", recorder.snapshots(), {{"scenario", s.name}});
    }

    if (s.t_end <= 0.0) {
        summary["verdict"] = {{"skipped", "t_end = 0: initial snapshot only"}};
        return finish(s, summary, exit_ok, "ok");
    }
    if (!curve->star_interior)
        fail(ErrorKind::unsupported, "front verdicts need an interior minimizer (λ* < σ(K))");

    std::vector<double> times;
    for (auto [t, _] : primary.points) times.push_back(t);
    const Envelope env = theoretical_envelope(*curve, s.coefficient, lambda_init, times);
    io::write_envelope_csv(s.output / "envelope.csv", env, eta, primary);

    VerdictOptions vo;
    vo.eta = eta;
    vo.speed_tolerance = s.fronts.speed_tolerance_fraction * env.lower_slope;
    vo.position_tolerance = s.grid.dx;
    vo.inner_tolerance = s.fronts.inner_tolerance;
    vo.burn_in = burn_in;
    vo.fit_lo = s.fronts.fit_lo;
    vo.fit_hi = s.fronts.fit_hi;
    Verdict v = verdict(primary, env, rs.final_field, vo);
    VerdictCheck tail_check{"upper_tail", tail->first <= 1e-3, {{"max_u", tail->first}, {"at_t", tail->second}, {"from_t", tail_from}, {"limit", 1e-3}}};
    v.checks.push_back(tail_check);
    v.pass = v.pass && tail_check.passed;

    json vj = io::to_json(v);
    vj["expected_slope"] = env.lower_slope;
    vj["slow_decay"] = env.slow_decay;
    vj["lambda_upper"] = env.lambda_upper;
    vj["burn_in"] = burn_in;
    io::write_json(s.output / "verdict.json", vj);
    summary["verdict"] = vj;

    if (s.wants("persistence")) {
        const auto p = persistence_diagnostics(recorder.snapshots(), primary);
        io::write_json(s.output / "persistence.json", io::to_json(p));
        summary["persistence"] = io::to_json(p);
    }
    return finish(s, summary, v.pass ? exit_ok : exit_violated, v.pass ? "ok" : "verdict failed");
}

CommandResult cmd_verify(const Scenario& s) {
    json summary = header(s, "verify");
    CommandResult failure;
    const auto curve = prepare(s, summary, failure);
    if (!curve) return failure;
    summary["speeds"] = io::speed_summary(*curve);
    if (!curve->star_interior) fail(ErrorKind::unsupported, "certificates need an interior minimizer (λ* < σ(K))");

    const Nonlinearity nl = s.make_nonlinearity();
    int code = exit_ok;
    json certificates = json::object();
    const auto record = [&](const std::string& name, const CertificateResult& r) {
        const json j = io::to_json(r);
        io::write_json(s.output / ("certificate_" + name + ".json"), j);
        certificates[name] = j;
        if (r.status == CertificateStatus::violated) code = combine(code, exit_violated);
        if (r.status == CertificateStatus::not_certified) code = combine(code, exit_not_certified);
    };

    const Field initial = make_initial(s.initial, s.grid);
    const Candidate super = exp_supersolution(*curve, s.coefficient, s.initial.tail_rate(), initial);
    record("super", check_candidate(s.kernel, nl, super, default_window(super, s.verify.nt, s.verify.nz, s.verify.t_hi)));

    CosineSearchOptions co;
    co.r_min = s.verify.cosine_r_min;
    co.r_cap = s.verify.cosine_r_cap;
    co.nt = s.verify.nt;
    co.nz = s.verify.nz;
    co.t_hi = s.verify.t_hi;
    const CertificateResult cosine = search_cosine_subsolution(s.kernel, nl, *curve, co);
    record("cosine", cosine);

    const double lambda = s.verify.two_exp_lambda_fraction * curve->lambda_star;
    TwoExpSearchOptions to;
    to.nt = s.verify.nt;
    to.nz = s.verify.nz;
    to.t_hi = s.verify.t_hi;
    const CertificateResult two_exp = search_two_exp_subsolution(s.kernel, nl, *curve, lambda, to);
    record("two_exp", two_exp);

    Solver solver(s.kernel, nl, s.grid, s.solver);
    const ComparisonReport cmp =
        random_comparison_test(solver, s.verify.comparison_pairs, s.seed, s.verify.comparison_t_end, s.dt);
    io::write_json(s.output / "comparison.json", io::to_json(cmp));
    summary["comparison"] = io::to_json(cmp);
    if (!cmp.passed) code = combine(code, exit_violated);

    const PositivityReport pos = positivity_test(solver, initial, s.verify.positivity_t_probe, s.dt);
    io::write_json(s.output / "positivity.json", io::to_json(pos));
    summary["positivity"] = io::to_json(pos);
    if (!pos.skipped && !pos.passed) code = combine(code, exit_violated);

    if (s.verify.perturb) {
        // Deliberately broken constants; these are expected to come out violated
        // and do not affect the exit code.
        json perturbed = json::object();
        const ResidualOptions w_opts{.nt = s.verify.nt, .nz = s.verify.nz};
        const auto run_one = [&](const std::string& name, const Candidate& c) {
            const auto r = check_candidate(s.kernel, nl, c, default_window(c, w_opts.nt, w_opts.nz, s.verify.t_hi));
            json j = io::to_json(r);
            j["expected"] = "violated";
            perturbed[name] = j;
        };
        if (two_exp.candidate) {
            const auto& p = two_exp.candidate->parameters;
            const Adjuster a = two_exp_adjuster(s.coefficient, lambda);
            run_one("two_exp_h_doubled_lambda",
                    two_exp_subsolution(s.kernel, s.coefficient, lambda, 2.0 * lambda, p.at("B1"), a));
            const Candidate tiny = two_exp_subsolution(s.kernel, s.coefficient, lambda, p.at("h"), 1e-9, a);
            json j = io::to_json(
                check_candidate(s.kernel, nl, tiny, default_window(tiny, w_opts.nt, w_opts.nz, s.verify.t_hi)));
            j["expected"] = "informational";
            perturbed["two_exp_B1_tiny"] = j;
        }
        if (cosine.candidate) {
            const auto& p = cosine.candidate->parameters;
            run_one("cosine_eta_2",
                    cosine_subsolution(s.kernel, p.at("gamma"), p.at("R"), p.at("B"), 2.0, cosine_adjuster(s.coefficient)));
        }
        io::write_json(s.output / "perturbed.json", perturbed);
        summary["perturbed"] = perturbed;
    }

    summary["certificates"] = certificates;
    std::string message = "ok";
    if (code == exit_violated) message = "violated";
    if (code == exit_not_certified) message = "not certified";
    return finish(s, summary, code, message);
}

CommandResult cmd_report(const Scenario& s) {
    json summary = header(s, "report");
    fs::create_directories(s.output);
    int code = exit_ok;
    const auto sub = [&](const std::string& verb) {
        Scenario t = s;
        t.output = s.output / verb;
        const CommandResult r = run_verb(verb, t);
        summary[verb] = {{"exit_code", r.exit_code}, {"status", r.message}};
        code = combine(code, r.exit_code);
        return r.exit_code;
    };
    if (s.wants("assumptions") || s.wants("speeds")) {
        if (sub("speeds") == exit_assumption) return finish(s, summary, code, "assumption failed");
    }
    if (s.wants("simulate") || s.wants("persistence")) sub("simulate");
    if (s.wants("verify")) sub("verify");
    return finish(s, summary, code, code == exit_ok ? "ok" : "some checks did not pass");
}

CommandResult run_verb(const std::string& verb, const Scenario& s) {
    try {
        if (verb == "speeds") return cmd_speeds(s);
        if (verb == "simulate") return cmd_simulate(s);
        if (verb == "verify") return cmd_verify(s);
        if (verb == "report") return cmd_report(s);
        fail(ErrorKind::invalid_input, "unknown verb '" + verb + "'");
    } catch (const Error& e) {
        json summary = header(s, verb);
        summary["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
        try {
            return finish(s, summary, exit_code_for(e.kind()), e.what());
        } catch (const std::exception&) {
            return {exit_code_for(e.kind()), summary, e.what()};
        }
    }
}

CommandResult cmd_sweep(const json& sweep, const fs::path& base_dir, const fs::path& out, int threads) {
    if (!sweep.is_object() || !sweep.contains("base") || !sweep.contains("grid"))
        fail(ErrorKind::invalid_input, "sweep documents need 'base' and 'grid'");
    json base = sweep.at("base");
    fs::path scenario_dir = base_dir;
    if (base.is_string()) {
        fs::path p = base.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        base = io::read_json(p);
        scenario_dir = p.parent_path();
    }
    const std::string verb = sweep.value("verb", "simulate");

    std::vector<std::pair<std::string, std::vector<json>>> axes;
    for (const auto& [path, values] : sweep.at("grid").items()) {
        if (!values.is_array() || values.empty())
            fail(ErrorKind::invalid_input, "sweep axis '" + path + "' needs a non-empty list");
        axes.emplace_back(path, std::vector<json>(values.begin(), values.end()));
    }
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.second.size();

    std::vector<json> rows(total);
    std::vector<int> codes(total, exit_ok);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            json doc = base;
            json overrides = json::object();
            std::size_t rest = i;
            for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
                const json& v = it->second[rest % it->second.size()];
                rest /= it->second.size();
                set_dotted(doc, it->first, v);
                overrides[it->first] = v;
            }
            std::ostringstream dir;
            dir << "run_" << std::setw(3) << std::setfill('0') << i;
            doc["output"] = (out / dir.str()).string();
            json row = {{"index", i}, {"dir", dir.str()}, {"overrides", overrides}};
            try {
                const Scenario s = scenario_from_json(doc, scenario_dir);
                const CommandResult r = run_verb(verb, s);
                codes[i] = r.exit_code;
                row["exit_code"] = r.exit_code;
                row["status"] = r.message;
                if (r.summary.contains("speeds")) row["c_star"] = r.summary["speeds"].value("c_star", 0.0);
                if (r.summary.contains("verdict") && r.summary["verdict"].contains("fit"))
                    row["fitted_slope"] = r.summary["verdict"]["fit"]["slope"];
            } catch (const Error& e) {
                codes[i] = exit_code_for(e.kind());
                row["exit_code"] = codes[i];
                row["status"] = e.what();
            }
            rows[i] = row;
        }
    };
    threads = std::max(1, std::min<int>(threads, static_cast<int>(total)));
    std::vector<std::thread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = exit_ok;
    for (int c : codes) code = combine(code, c);
    json summary = {{"verb", verb}, {"runs", rows}, {"exit_code", code}};
    fs::create_directories(out);
    io::write_json(out / "sweep.json", summary);
    return {code, summary, code == exit_ok ? "ok" : "some runs did not pass"};
}

}  // namespace nlkpp
