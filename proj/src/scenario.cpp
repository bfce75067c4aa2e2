#include "nlkpp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlkpp/error.hpp"
#include "nlkpp/fronts.hpp"

namespace nlkpp {

using io::json;

namespace {

const std::set<std::string> kTopLevelKeys{"name",    "kernel", "coefficient", "nonlinearity", "initial",
                                          "grid",    "time",   "fronts",      "least_mean",   "checks",
                                          "speeds",  "verify", "solver",      "output",       "snapshots",
                                          "seed",    "reflect"};

const std::set<std::string> kChecks{"assumptions", "speeds", "simulate", "verify", "persistence"};

double num(const json& j, const char* key, double fallback) {
    return j.contains(key) ? io::to_double(j.at(key)) : fallback;
}

int integer(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const double v = io::to_double(j.at(key));
    if (v != std::floor(v)) fail(ErrorKind::invalid_input, std::string("'") + key + "' must be an integer");
    return static_cast<int>(v);
}

const json& section(const json& j, const char* key, std::initializer_list<const char*> allowed) {
    static const json empty = json::object();
    if (!j.contains(key)) return empty;
    const json& sec = j.at(key);
    if (!sec.is_object()) fail(ErrorKind::invalid_input, std::string("'") + key + "' must be an object");
    for (const auto& [name, _] : sec.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return name == a; }))
            fail(ErrorKind::invalid_input, "unknown field '" + std::string(key) + "." + name + "'");
    return sec;
}

ConvolutionMethod parse_method(const std::string& s) {
    if (s == "direct") return ConvolutionMethod::direct;
    if (s == "direct_serial") return ConvolutionMethod::direct_serial;
    if (s == "spectral") return ConvolutionMethod::spectral;
    fail(ErrorKind::invalid_input, "unknown solver method '" + s + "'");
}

Boundary parse_boundary(const std::string& s) {
    if (s == "zero_pad") return Boundary::zero_pad;
    if (s == "periodic") return Boundary::periodic;
    fail(ErrorKind::invalid_input, "unknown boundary '" + s + "'");
}

}  // namespace

Nonlinearity Scenario::make_nonlinearity() const {
    if (nonlinearity == "logistic") return Nonlinearity::logistic(coefficient);
    if (nonlinearity == "logistic_h") return Nonlinearity::logistic_h(coefficient, big_h);
    if (nonlinearity == "saturating") return Nonlinearity::saturating(coefficient, kappa);
    fail(ErrorKind::invalid_input, "unknown nonlinearity '" + nonlinearity + "'");
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) fail(ErrorKind::invalid_input, "scenario must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kTopLevelKeys.count(key)) fail(ErrorKind::invalid_input, "unknown scenario field '" + key + "'");

    Scenario s;
    s.source = j;
    s.name = j.value("name", s.name);
    if (j.contains("kernel")) s.kernel = io::kernel_from_json(j.at("kernel"), base_dir);
    if (j.value("reflect", false)) s.kernel = s.kernel.reflected();
    if (j.contains("coefficient")) s.coefficient = io::coefficient_from_json(j.at("coefficient"), base_dir);

    const json& nl = section(j, "nonlinearity", {"kind", "H", "kappa"});
    s.nonlinearity = nl.value("kind", s.nonlinearity);
    s.big_h = num(nl, "H", s.big_h);
    s.kappa = num(nl, "kappa", s.kappa);
    (void)s.make_nonlinearity();

    if (j.contains("initial")) s.initial = io::initial_from_json(j.at("initial"));
    s.initial.validate();

    const json& g = section(j, "grid", {"x_min", "x_max", "n", "dx"});
    const double x_min = num(g, "x_min", s.grid.x_min);
    const double x_max = num(g, "x_max", s.grid.x_max);
    if (g.contains("dx") && g.contains("n")) fail(ErrorKind::invalid_input, "grid takes either 'n' or 'dx', not both");
    s.grid = g.contains("dx") ? Grid::with_spacing(x_min, x_max, num(g, "dx", 0.0))
                              : Grid::make(x_min, x_max, integer(g, "n", s.grid.n));

    const json& t = section(j, "time", {"dt", "t_end", "stride"});
    s.dt = num(t, "dt", s.dt);
    s.t_end = num(t, "t_end", s.t_end);
    s.stride = integer(t, "stride", s.stride);
    if (!(s.dt > 0.0) || !(s.t_end >= 0.0) || s.stride < 1)
        fail(ErrorKind::invalid_parameters, "time needs dt > 0, t_end >= 0 and stride >= 1");

    const json& fr = section(j, "fronts", {"thresholds", "primary", "eta_fraction", "speed_tolerance_fraction", "inner_tolerance", "fit_window"});
    if (fr.contains("thresholds")) {
        s.fronts.thresholds.clear();
        for (const auto& v : fr.at("thresholds")) s.fronts.thresholds.push_back(io::to_double(v));
    }
    s.fronts.primary = num(fr, "primary", s.fronts.primary);
    if (std::find(s.fronts.thresholds.begin(), s.fronts.thresholds.end(), s.fronts.primary) ==
        s.fronts.thresholds.end())
        s.fronts.thresholds.push_back(s.fronts.primary);
    s.fronts.eta_fraction = num(fr, "eta_fraction", s.fronts.eta_fraction);
    s.fronts.speed_tolerance_fraction = num(fr, "speed_tolerance_fraction", s.fronts.speed_tolerance_fraction);
    s.fronts.inner_tolerance = num(fr, "inner_tolerance", s.fronts.inner_tolerance);
    if (fr.contains("fit_window")) {
        const auto& w = fr.at("fit_window");
        if (!w.is_array() || w.size() != 2) fail(ErrorKind::invalid_input, "fit_window must be [lo, hi]");
        s.fronts.fit_lo = io::to_double(w[0]);
        s.fronts.fit_hi = io::to_double(w[1]);
    }

    const json& lm = section(j, "least_mean", {"t_max", "s_max", "levels"});
    s.least_mean.t_max = num(lm, "t_max", s.least_mean.t_max);
    s.least_mean.s_max = num(lm, "s_max", s.least_mean.s_max);
    s.least_mean.levels = integer(lm, "levels", s.least_mean.levels);

    if (j.contains("checks")) {
        s.checks.clear();
        for (const auto& c : j.at("checks")) {
            const auto name = c.get<std::string>();
            if (!kChecks.count(name)) fail(ErrorKind::invalid_input, "unknown check '" + name + "'");
            s.checks.insert(name);
        }
    }

    const json& sp = section(j, "speeds", {"lambda_grid", "minorant_delta", "minorant_m"});
    s.speeds.lambda_grid = integer(sp, "lambda_grid", s.speeds.lambda_grid);
    s.speeds.minorant_delta = num(sp, "minorant_delta", s.speeds.minorant_delta);
    s.speeds.minorant_m = num(sp, "minorant_m", s.speeds.minorant_m);
    if (s.speeds.lambda_grid < 2) fail(ErrorKind::invalid_parameters, "lambda_grid needs at least 2 rows");

    const json& v = section(j, "verify", {"nt", "nz", "t_hi", "two_exp_lambda_fraction", "cosine_r_min", "cosine_r_cap", "comparison_pairs", "comparison_t_end", "positivity_t_probe", "perturb"});
    s.verify.nt = integer(v, "nt", s.verify.nt);
    s.verify.nz = integer(v, "nz", s.verify.nz);
    s.verify.t_hi = num(v, "t_hi", s.verify.t_hi);
    s.verify.two_exp_lambda_fraction = num(v, "two_exp_lambda_fraction", s.verify.two_exp_lambda_fraction);
    s.verify.cosine_r_min = num(v, "cosine_r_min", s.verify.cosine_r_min);
    s.verify.cosine_r_cap = num(v, "cosine_r_cap", s.verify.cosine_r_cap);
    s.verify.comparison_pairs = integer(v, "comparison_pairs", s.verify.comparison_pairs);
    s.verify.comparison_t_end = num(v, "comparison_t_end", s.verify.comparison_t_end);
    s.verify.positivity_t_probe = num(v, "positivity_t_probe", s.verify.positivity_t_probe);
    s.verify.perturb = v.value("perturb", s.verify.perturb);

    const json& so = section(j, "solver", {"method", "boundary"});
    if (so.contains("method")) s.solver.method = parse_method(so.at("method").get<std::string>());
    if (so.contains("boundary")) s.solver.boundary = parse_boundary(so.at("boundary").get<std::string>());

    if (j.contains("output")) s.output = j.at("output").get<std::string>();
    s.write_snapshots = j.value("snapshots", s.write_snapshots);
    if (j.contains("seed")) {
        const double seed = io::to_double(j.at("seed"));
        if (seed < 0 || seed != std::floor(seed)) fail(ErrorKind::invalid_input, "seed must be a non-negative integer");
        s.seed = static_cast<std::uint64_t>(seed);
    }

    if (s.wants("simulate") && s.t_end > 0.0) {
        const double burn_in = burn_in_time(s.kernel.mass(), s.t_end);
        if (!(s.t_end > burn_in)) {
            std::ostringstream os;
            os << "t_end = " << s.t_end << " must exceed the burn-in time " << burn_in;
            fail(ErrorKind::invalid_parameters, os.str());
        }
    }
    return s;
}

void set_dotted(json& j, const std::string& path, const json& value) {
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) fail(ErrorKind::invalid_input, "malformed override path '" + path + "'");
        if (!node->is_object()) *node = json::object();
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

void apply_overrides(json& j, const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) fail(ErrorKind::invalid_input, "override '" + a + "' is not key=value");
        const std::string raw = a.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = raw;
        }
        set_dotted(j, a.substr(0, eq), value);
    }
}

}  // namespace nlkpp
