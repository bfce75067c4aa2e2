#include "nlkpp/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nlkpp/error.hpp"

namespace nlkpp::io {

namespace fs = std::filesystem;

json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double to_double(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInfinity;
        if (s == "-inf") return -kInfinity;
        if (s == "nan") return std::nan("");
        try {
            return std::stod(s);
        } catch (const std::exception&) {
        }
    }
    fail(ErrorKind::invalid_input, "expected a number, got " + j.dump());
}

namespace {

double get(const json& j, const char* key, double fallback) { return j.contains(key) ? to_double(j.at(key)) : fallback; }

double require(const json& j, const char* key, const std::string& what) {
    if (!j.contains(key)) fail(ErrorKind::invalid_input, what + " needs '" + key + "'");
    return to_double(j.at(key));
}

std::vector<double> doubles(const json& j) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(to_double(v));
    return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

// Uniform-grid samples (first column) from a CSV, as (start, step, values).
std::tuple<double, double, std::vector<double>> uniform_samples(const fs::path& path) {
    const auto rows = read_two_column_csv(path);
    if (rows.size() < 2) fail(ErrorKind::invalid_input, "need at least two samples in " + path.string());
    const double x0 = rows[0].first;
    const double step = rows[1].first - rows[0].first;
    std::vector<double> values;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::abs(rows[i].first - (x0 + step * static_cast<double>(i))) > 1e-9 * std::max(1.0, std::abs(step)))
            fail(ErrorKind::invalid_input, "samples in " + path.string() + " are not on a uniform grid");
        values.push_back(rows[i].second);
    }
    return {x0, step, values};
}

json sinusoids_to_json(const std::vector<Sinusoid>& terms) {
    json a = json::array();
    for (const auto& s : terms)
        a.push_back({{"amplitude", s.amplitude}, {"angular_frequency", s.angular_frequency}, {"phase", s.phase}});
    return a;
}

std::vector<Sinusoid> sinusoids_from_json(const json& j) {
    std::vector<Sinusoid> terms;
    for (const auto& t : j)
        terms.push_back({require(t, "amplitude", "sinusoid"), require(t, "angular_frequency", "sinusoid"),
                         get(t, "phase", 0.0)});
    return terms;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, mode);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

}  // namespace

std::vector<std::pair<double, double>> read_two_column_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot read " + path.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ls(line);
        double a = 0.0, b = 0.0;
        if (!(ls >> a >> b)) {
            if (first) {
                first = false;
                continue;
            }
            fail(ErrorKind::invalid_input, "malformed row in " + path.string() + ": " + line);
        }
        first = false;
        rows.emplace_back(a, b);
    }
    return rows;
}

// --------------------------------------------------------------------- kernel

KernelSpec kernel_from_json(const json& j, const fs::path& base_dir) {
    const std::string family = j.value("family", "");
    const json params = j.value("params", json::object());
    const double scale = get(j, "scale", 1.0);
    if (family == "gaussian") return KernelSpec::gaussian(get(params, "variance", 1.0), scale);
    if (family == "laplace")
        return KernelSpec::laplace(get(params, "rate_left", 1.0), get(params, "rate_right", 1.0), scale);
    if (family == "tent") return KernelSpec::tent(get(params, "halfwidth", 1.0), scale);
    if (family == "tabulated") {
        if (params.contains("csv")) {
            auto [y0, dy, values] = uniform_samples(resolve(base_dir, params.at("csv").get<std::string>()));
            return KernelSpec::tabulated(y0, dy, std::move(values), scale);
        }
        return KernelSpec::tabulated(require(params, "y0", "tabulated kernel"), require(params, "dy", "tabulated kernel"),
                                     doubles(params.at("values")), scale);
    }
    fail(ErrorKind::invalid_input, "unknown kernel family '" + family + "'");
}

json kernel_to_json(const KernelSpec& k) {
    json params = std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Gaussian>) return {{"variance", f.variance}};
            if constexpr (std::is_same_v<T, Laplace>) return {{"rate_left", f.rate_left}, {"rate_right", f.rate_right}};
            if constexpr (std::is_same_v<T, Tent>) return {{"halfwidth", f.halfwidth}};
            if constexpr (std::is_same_v<T, Tabulated>) return {{"y0", f.y0}, {"dy", f.dy}, {"values", f.values}};
        },
        k.family());
    return {{"family", k.family_name()}, {"params", params}, {"scale", k.scale()}};
}

// ---------------------------------------------------------------- coefficient

Coefficient coefficient_from_json(const json& j, const fs::path& base_dir) {
    const std::string form = j.value("form", "");
    const json params = j.value("params", json::object());
    const auto base = [&]() -> Coefficient {
        if (form == "constant") return Coefficient::constant(require(params, "value", "constant coefficient"));
        if (form == "periodic")
            return Coefficient::periodic(get(params, "offset", 0.0), sinusoids_from_json(params.value("terms", json::array())));
        if (form == "quasiperiodic")
            return Coefficient::quasiperiodic(get(params, "offset", 0.0),
                                              sinusoids_from_json(params.value("terms", json::array())));
        if (form == "piecewise")
            return Coefficient::piecewise(doubles(params.at("breakpoints")), doubles(params.at("values")),
                                          get(params, "ramp_width", 0.0));
        if (form == "dyadic_on_off")
            return dyadic_on_off(static_cast<int>(require(params, "k_max", "dyadic coefficient")),
                                 get(params, "low", 1.0), get(params, "high", 2.0));
        if (form == "tabulated") {
            if (params.contains("csv")) {
                auto [t0, dt, values] = uniform_samples(resolve(base_dir, params.at("csv").get<std::string>()));
                return Coefficient::tabulated(t0, dt, std::move(values));
            }
            return Coefficient::tabulated(get(params, "t0", 0.0), require(params, "dt", "tabulated coefficient"),
                                          doubles(params.at("values")));
        }
        fail(ErrorKind::invalid_input, "unknown coefficient form '" + form + "'");
    }();
    Coefficient c = base;
    if (j.contains("time_shift")) c = c.shifted(to_double(j.at("time_shift")));
    if (j.contains("additive")) c = c.plus_constant(to_double(j.at("additive")));
    return c;
}

json coefficient_to_json(const Coefficient& c) {
    json params = std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ConstantForm>) return {{"value", f.value}};
            if constexpr (std::is_same_v<T, PeriodicForm> || std::is_same_v<T, QuasiPeriodicForm>)
                return {{"offset", f.offset}, {"terms", sinusoids_to_json(f.terms)}};
            if constexpr (std::is_same_v<T, PiecewiseForm>)
                return {{"breakpoints", f.breakpoints}, {"values", f.values}, {"ramp_width", f.ramp_width}};
            if constexpr (std::is_same_v<T, TabulatedSeries>)
                return {{"t0", f.t0}, {"dt", f.dt}, {"values", f.values}};
        },
        c.form());
    json j = {{"form", c.form_name()}, {"params", params}, {"horizon", number(c.horizon())}};
    if (c.time_shift() != 0.0) j["time_shift"] = c.time_shift();
    if (c.additive() != 0.0) j["additive"] = c.additive();
    return j;
}

// ------------------------------------------------------------------- initial

InitialData initial_from_json(const json& j) {
    const std::string kind = j.value("kind", "compact_bump");
    const double shift = get(j, "shift", 0.0);
    if (kind == "compact_bump") return InitialData::compact_bump(get(j, "A", 10.0), get(j, "p", 0.5), shift);
    if (kind == "plateau_tail")
        return InitialData::plateau_tail(get(j, "alpha", 1.0), get(j, "A", 5.0), get(j, "p", 0.5),
                                         require(j, "lambda", "plateau_tail"), shift);
    if (kind == "pure_exponential")
        return InitialData::pure_exponential(get(j, "p", 0.5), require(j, "lambda", "pure_exponential"), shift);
    if (kind == "custom") return InitialData::custom(doubles(j.at("x")), doubles(j.at("values")), shift);
    fail(ErrorKind::invalid_input, "unknown initial data kind '" + kind + "'");
}

json initial_to_json(const InitialData& d) {
    json j = {{"kind", d.kind_name()}, {"shift", d.shift}};
    switch (d.kind) {
        case InitialData::Kind::compact_bump:
            j["A"] = d.a;
            j["p"] = d.p;
            break;
        case InitialData::Kind::plateau_tail:
            j["alpha"] = d.alpha;
            j["A"] = d.a;
            j["p"] = d.p;
            j["lambda"] = d.lambda;
            break;
        case InitialData::Kind::pure_exponential:
            j["p"] = d.p;
            j["lambda"] = d.lambda;
            break;
        case InitialData::Kind::custom:
            j["x"] = d.custom_x;
            j["values"] = d.custom_values;
            break;
    }
    return j;
}

// -------------------------------------------------------------------- reports

json to_json(const LeastMeanEstimate& e) {
    json ladder = json::array();
    for (auto [t, v] : e.window_sequence) ladder.push_back({{"T", t}, {"inf_average", v}});
    return {{"value", e.value},
            {"converged", e.converged},
            {"tolerance_achieved", number(e.tolerance_achieved)},
            {"ladder", ladder}};
}

json to_json(const AssumptionReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json measured = json::object();
        for (const auto& [k, v] : c.measured) measured[k] = number(v);
        checks.push_back({{"id", c.id}, {"statement", c.statement}, {"passed", c.passed}, {"measured", measured}});
    }
    return {{"all_passed", r.all_passed()}, {"checks", checks}};
}

json to_json(const SpeedFit& f) {
    return {{"t_lo", f.t_lo},
            {"t_hi", f.t_hi},
            {"slope", f.slope},
            {"intercept", f.intercept},
            {"residual_rms", f.residual_rms},
            {"points", f.points}};
}

json to_json(const Verdict& v) {
    json checks = json::array();
    for (const auto& c : v.checks) {
        json numbers = json::object();
        for (const auto& [k, x] : c.numbers) numbers[k] = number(x);
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"numbers", numbers}});
    }
    return {{"pass", v.pass}, {"checks", checks}, {"fit", to_json(v.fit)}};
}

json to_json(const ResidualReport& r) {
    return {{"kind", r.kind},
            {"side", r.side},
            {"t_range", {r.t_lo, r.t_hi}},
            {"z_range", {r.z_lo, r.z_hi}},
            {"samples", r.samples},
            {"extremum", number(r.extremum)},
            {"witness", {{"t", r.at_t}, {"x", r.at_x}, {"residual", number(r.extremum)}}},
            {"tolerance", r.tolerance},
            {"scale", r.scale},
            {"max_quadrature_error", r.max_quadrature_error},
            {"inconclusive", r.inconclusive},
            {"passed", r.passed}};
}

json to_json(const CertificateResult& r) {
    json j = {{"status", to_string(r.status)}, {"message", r.message}, {"attempts", r.attempts}};
    if (r.candidate) {
        json params = json::object();
        for (const auto& [k, v] : r.candidate->parameters) params[k] = number(v);
        j["candidate"] = {{"kind", r.candidate->kind}, {"parameters", params}};
    }
    if (r.attempts > 0) j["residual"] = to_json(r.report);
    return j;
}

json to_json(const ComparisonReport& r) {
    return {{"pairs", r.pairs},
            {"max_violation", r.max_violation},
            {"worst_t", r.worst_t},
            {"worst_pair", r.worst_pair},
            {"per_pair", r.per_pair},
            {"passed", r.passed}};
}

json to_json(const PositivityReport& r) {
    return {{"skipped", r.skipped},
            {"t_probe", r.t_probe},
            {"support", {r.support_lo, r.support_hi}},
            {"reachable", {r.reach_lo, r.reach_hi}},
            {"cells_checked", r.cells_checked},
            {"nonpositive", r.nonpositive},
            {"min_value", number(r.min_value)},
            {"passed", r.passed}};
}

json to_json(const PersistenceReport& r) {
    json conclusion = json::object();
    for (const auto& [k, v] : r.conclusion) {
        std::ostringstream key;
        key << "k=" << k;
        conclusion[key.str()] = number(v);
    }
    return {{"window_lo", r.window_lo}, {"h1", number(r.h1)}, {"h3", number(r.h3)}, {"conclusion", conclusion}};
}

json speed_summary(const SpeedCurve& c) {
    return {{"lambda_star", c.lambda_star},
            {"c_star", c.c_star},
            {"star_interior", c.star_interior},
            {"identity_gap", c.identity_gap},
            {"mu_least_mean", c.mu_least_mean},
            {"scan_right_edge", c.scan_right_edge}};
}

// ---------------------------------------------------------------------- files

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::invalid_input, path.string() + ": " + e.what());
    }
}

void write_speed_curve_csv(const fs::path& path, const SpeedCurve& c) {
    auto out = open_out(path);
    out << "lambda,speed\n";
    for (auto [l, s] : c.samples) out << l << ',' << s << '\n';
}

void write_fronts_csv(const fs::path& path, const std::vector<FrontTrace>& traces) {
    auto out = open_out(path);
    out << "t,theta,X\n";
    for (const auto& tr : traces)
        for (auto [t, x] : tr.points) out << t << ',' << tr.theta << ',' << x << '\n';
}

void write_envelope_csv(const fs::path& path, const Envelope& env, double eta, const FrontTrace& trace) {
    auto out = open_out(path);
    out << "t,upper,upper_plus_eta,lower,X\n";
    for (std::size_t i = 0; i < env.t.size(); ++i) {
        const double t = env.t[i];
        out << t << ',' << env.upper[i] << ',' << env.upper[i] + eta * t << ',' << env.lower[i] << ',';
        const auto it = std::find_if(trace.points.begin(), trace.points.end(),
                                     [&](const auto& p) { return std::abs(p.first - t) < 1e-9; });
        if (it != trace.points.end()) out << it->second;
        out << '\n';
    }
}

void write_snapshots_csv(const fs::path& path, const std::vector<Field>& snaps) {
    auto out = open_out(path);
    out << "t,x,u\n";
    for (const auto& f : snaps)
        for (int i = 0; i < f.grid.n; ++i) out << f.t << ',' << f.grid.x(i) << ',' << f.values[static_cast<std::size_t>(i)] << '\n';
}

void write_snapshots_binary(const fs::path& path, const std::vector<Field>& snaps, const json& metadata) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    for (const auto& f : snaps) {
        out.write(reinterpret_cast<const char*>(&f.t), sizeof(double));
        out.write(reinterpret_cast<const char*>(f.values.data()),
                  static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    }
    json side = metadata;
    if (!snaps.empty()) {
        const Grid& g = snaps.front().grid;
        side["grid"] = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n", g.n}, {"dx", g.dx}};
    }
    side["snapshots"] = snaps.size();
    side["layout"] = "per snapshot: t then n values, little-endian float64";
    write_json(fs::path(path).concat(".json"), side);
}

std::vector<Field> read_snapshots_binary(const fs::path& path) {
    const json side = read_json(fs::path(path).concat(".json"));
    const auto& g = side.at("grid");
    const Grid grid = Grid::make(g.at("x_min").get<double>(), g.at("x_max").get<double>(), g.at("n").get<int>());
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read " + path.string());
    std::vector<Field> snaps;
    const auto count = side.at("snapshots").get<std::size_t>();
    for (std::size_t s = 0; s < count; ++s) {
        Field f{grid, 0.0, std::vector<double>(grid.size())};
        in.read(reinterpret_cast<char*>(&f.t), sizeof(double));
        in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
        if (!in) fail(ErrorKind::io, "truncated snapshot file " + path.string());
        snaps.push_back(std::move(f));
    }
    return snaps;
}

}  // namespace nlkpp::io
