#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nlkpp/dynamics.hpp"
#include "nlkpp/env.hpp"
#include "nlkpp/io.hpp"
#include "nlkpp/kernel.hpp"

namespace nlkpp {

struct FrontSettings {
    std::vector<double> thresholds{0.1, 0.5, 0.9};
    double primary = 0.5;
    /// η = eta_fraction * c*.
    double eta_fraction = 0.1;
    /// Slope slack = speed_tolerance_fraction * (expected slope).
    double speed_tolerance_fraction = 0.05;
    double inner_tolerance = 0.05;
    /// Empty window (lo >= hi) selects [burn-in, t_end].
    double fit_lo = 0.0;
    double fit_hi = 0.0;
};

struct LeastMeanSettings {
    double t_max = 256.0;
    double s_max = 64.0;
    int levels = 8;
};

struct SpeedSettings {
    int lambda_grid = 256;
    /// Half-width of the cosine minorant; 0 picks min(1, half the effective support).
    double minorant_delta = 0.0;
    /// Constant growth rate for c0; nan picks inf μ.
    double minorant_m = std::numeric_limits<double>::quiet_NaN();
};

struct VerifySettings {
    int nt = 200;
    int nz = 200;
    double t_hi = 10.0;
    double two_exp_lambda_fraction = 0.5;
    double cosine_r_min = 0.0;
    double cosine_r_cap = 1e3;
    int comparison_pairs = 20;
    double comparison_t_end = 20.0;
    double positivity_t_probe = 1.0;
    /// Also run deliberately broken candidates and report them.
    bool perturb = true;
};

/// Fully resolved scenario. `source` keeps the (override-applied) JSON document.
struct Scenario {
    std::string name = "scenario";
    KernelSpec kernel = KernelSpec::gaussian(1.0);
    Coefficient coefficient = Coefficient::constant(2.0);
    std::string nonlinearity = "logistic";
    double big_h = 1.0;
    double kappa = 0.0;
    InitialData initial = InitialData::compact_bump(10.0, 0.5, -10.0);
    Grid grid = Grid::make(-100.0, 500.0, 8192);
    double dt = 0.05;
    double t_end = 120.0;
    int stride = 20;
    FrontSettings fronts;
    LeastMeanSettings least_mean;
    std::set<std::string> checks{"assumptions", "speeds", "simulate", "verify", "persistence"};
    SpeedSettings speeds;
    VerifySettings verify;
    SolverOptions solver;
    std::filesystem::path output = "out";
    std::uint64_t seed = 1;
    bool write_snapshots = false;
    io::json source;

    Nonlinearity make_nonlinearity() const;
    bool wants(const std::string& check) const { return checks.count(check) > 0; }
};

/// Parses a scenario document; relative CSV paths resolve against base_dir.
Scenario scenario_from_json(const io::json& j, const std::filesystem::path& base_dir = {});

/// Sets j[a][b][c] = value for the dotted path "a.b.c", creating objects as needed.
void set_dotted(io::json& j, const std::string& path, const io::json& value);

/// Applies "key=value" overrides; values parse as JSON when possible, else as strings.
void apply_overrides(io::json& j, const std::vector<std::string>& assignments);

}  // namespace nlkpp
