#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "nlkpp/commands.hpp"
#include "nlkpp/io.hpp"
#include "nlkpp/scenario.hpp"

using namespace nlkpp;
using io::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = NLKPP_TEST_DATA;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nlkpp_unit_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

json small_scenario(const std::string& out) {
    json j = io::read_json(kData / "small.json");
    j["output"] = scratch(out).string();
    return j;
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("non-finite numbers survive a JSON round trip") {
        CHECK(io::number(1.5) == json(1.5));
        CHECK(io::number(INFINITY) == json("inf"));
        CHECK(std::isinf(io::to_double(io::number(-INFINITY))));
        CHECK(std::isnan(io::to_double(io::number(NAN))));
        CHECK_THROWS_AS((void)io::to_double(json("abc")), Error);
    }

    TEST_CASE("kernels, coefficients and initial data round-trip") {
        for (const auto& k : {KernelSpec::gaussian(2.0, 0.5), KernelSpec::laplace(1.0, 3.0), KernelSpec::tent(0.7)}) {
            const auto back = io::kernel_from_json(io::kernel_to_json(k));
            CHECK(back.mgf(0.5) == doctest::Approx(k.mgf(0.5)).epsilon(1e-14));
            CHECK(back.family_name() == k.family_name());
        }
        const auto c = Coefficient::periodic(2.0, {{1.0, 6.0, 0.2}}).shifted(0.5).plus_constant(0.25);
        const auto cb = io::coefficient_from_json(io::coefficient_to_json(c));
        for (double t : {0.0, 0.7, 3.1}) CHECK(cb(t) == doctest::Approx(c(t)));
        const auto d = io::coefficient_from_json({{"form", "dyadic_on_off"}, {"params", {{"k_max", 3}}}});
        CHECK(d(1.5) == 1.0);
        CHECK(d(3.0) == 2.0);
        const auto init = InitialData::plateau_tail(1.0, 5.0, 0.3, 0.6, 2.0);
        const auto ib = io::initial_from_json(io::initial_to_json(init));
        CHECK(ib(9.0) == doctest::Approx(init(9.0)));
    }

    TEST_CASE("tabulated kernels load from CSV") {
        const auto s = scenario_from_json(io::read_json(kData / "tabulated.json"), kData);
        CHECK(s.kernel.family_name() == "tabulated");
        CHECK(s.kernel.mass() == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(s.kernel.mgf(1.0) == doctest::Approx(2.0 * (std::cosh(1.0) - 1.0)).epsilon(1e-5));
    }

    TEST_CASE("scenario parsing, overrides and validation") {
        json j = io::read_json(kData / "small.json");
        apply_overrides(j, {"time.dt=0.025", "name=renamed", "fronts.thresholds=[0.3,0.6]", "solver.method=spectral"});
        const auto s = scenario_from_json(j);
        CHECK(s.dt == doctest::Approx(0.025));
        CHECK(s.name == "renamed");
        CHECK(s.fronts.thresholds.size() == 3);
        CHECK(s.solver.method == ConvolutionMethod::spectral);
        CHECK(s.grid.n == 2300);

        json bad = j;
        bad["colour"] = "blue";
        CHECK_THROWS_AS((void)scenario_from_json(bad), Error);
        json misspelt = j;
        misspelt["fronts"]["fit_lo"] = 60.0;
        CHECK_THROWS_AS((void)scenario_from_json(misspelt), Error);
        json short_run = j;
        set_dotted(short_run, "time.t_end", 5.0);
        CHECK_THROWS_AS((void)scenario_from_json(short_run), Error);
        CHECK_THROWS_AS(apply_overrides(j, {"novalue"}), Error);
    }

    TEST_CASE("binary snapshots round-trip") {
        const auto g = Grid::make(0.0, 1.0, 32);
        std::vector<Field> snaps{Field{g, 0.0, std::vector<double>(32, 0.25)}, Field{g, 0.5, std::vector<double>(32, 0.75)}};
        const auto dir = scratch("snaps");
        io::write_snapshots_binary(dir / "s.bin", snaps, {{"scenario", "x"}});
        const auto back = io::read_snapshots_binary(dir / "s.bin");
        REQUIRE(back.size() == 2);
        CHECK(back[1].t == 0.5);
        CHECK(back[1].values[7] == 0.75);
    }

    TEST_CASE("speeds command: summary, curve rows and determinism") {
        json j = small_scenario("speeds");
        set_dotted(j, "speeds.lambda_grid", 512);
        const auto s = scenario_from_json(j);
        const auto r = cmd_speeds(s);
        CHECK(r.exit_code == exit_ok);
        CHECK(r.summary["speeds"]["c_star"].get<double>() == doctest::Approx(2.54484135892786).epsilon(1e-9));
        CHECK(line_count(s.output / "speed_curve.csv") == 513);
        const auto first = slurp(s.output / "summary.json");
        (void)cmd_speeds(s);
        CHECK(slurp(s.output / "summary.json") == first);
    }

    TEST_CASE("speeds command reports the KPP condition failure") {
        json j = io::read_json(kData / "low_growth.json");
        j["output"] = scratch("low_growth").string();
        const auto r = run_verb("speeds", scenario_from_json(j));
        CHECK(r.exit_code == exit_assumption);
        bool named = false;
        for (const auto& c : r.summary["assumptions"]["checks"])
            if (c["statement"] == "⌊μ⌋ > K̄" && !c["passed"].get<bool>()) named = true;
        CHECK(named);
    }

    TEST_CASE("simulate with t_end = 0 emits the initial snapshot only") {
        json j = small_scenario("t0");
        set_dotted(j, "time.t_end", 0.0);
        j["snapshots"] = true;
        const auto s = scenario_from_json(j);
        const auto r = cmd_simulate(s);
        CHECK(r.exit_code == exit_ok);
        CHECK(io::read_json(s.output / "snapshots.bin.json")["snapshots"] == 1);
        CHECK(line_count(s.output / "snapshots.csv") == 1 + 2300);
    }

    TEST_CASE("simulate on the small reference scenario") {
        const auto s = scenario_from_json(small_scenario("sim"));
        const auto r = cmd_simulate(s);
        CHECK(r.exit_code == exit_ok);
        CHECK(r.summary["verdict"]["pass"].get<bool>());
        CHECK(fs::exists(s.output / "fronts.csv"));
        CHECK(fs::exists(s.output / "envelope.csv"));
        CHECK(fs::exists(s.output / "verdict.json"));
        CHECK(fs::exists(s.output / "persistence.json"));
    }

    TEST_CASE("sweeps run each combination in its own directory") {
        json base = small_scenario("unused");
        base["checks"] = json::array({"speeds"});
        const json sweep = {{"base", base}, {"verb", "speeds"}, {"grid", {{"coefficient.params.value", {1.5, 2.0, 3.0}}}}};
        const auto out = scratch("sweep");
        const auto r = cmd_sweep(sweep, {}, out, 2);
        CHECK(r.exit_code == exit_ok);
        REQUIRE(r.summary["runs"].size() == 3);
        CHECK(r.summary["runs"][2]["c_star"].get<double>() == doctest::Approx(3.32396066913680).epsilon(1e-9));
        CHECK(fs::exists(out / "run_001" / "summary.json"));
    }
}
