#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "nlkpp/commands.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    std::vector<std::string> sets;
    int lambda_grid = 0;
    long long seed = -1;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "Scenario JSON document")->required()->check(CLI::ExistingFile);
    app->add_option("--out", c.out, "Output directory (overrides the scenario's 'output')");
    app->add_option("--set", c.sets, "Override a field: dotted.path=value (repeatable)");
    app->add_option("--lambda-grid", c.lambda_grid, "Rows in speed_curve.csv")->check(CLI::PositiveNumber);
    app->add_option("--seed", c.seed, "Seed for randomised checks")->check(CLI::NonNegativeNumber);
}

/// Folds the convenience flags into the override list, in front of the explicit --set entries.
nlkpp::io::json load(const Common& c) {
    auto doc = nlkpp::io::read_json(c.config);
    std::vector<std::string> sets;
    if (!c.out.empty()) nlkpp::set_dotted(doc, "output", c.out);
    if (c.lambda_grid > 0) sets.push_back("speeds.lambda_grid=" + std::to_string(c.lambda_grid));
    if (c.seed >= 0) sets.push_back("seed=" + std::to_string(c.seed));
    sets.insert(sets.end(), c.sets.begin(), c.sets.end());
    nlkpp::apply_overrides(doc, sets);
    return doc;
}

int worker_cap() {
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("NONLOCAL_KPP_THREADS")) {
        try {
            threads = std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            std::cerr << "ignoring invalid NONLOCAL_KPP_THREADS='" << env << "'\n";
        }
    }
    return threads;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spreading speeds and front simulations for nonlocal KPP equations with time-dependent growth"};
    app.require_subcommand(1);

    Common common;
    std::vector<CLI::App*> verbs;
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"speeds", "Speed curve, minimal speed and assumption report"},
             {"simulate", "Run the solver, track fronts and judge them against the envelopes"},
             {"verify", "Residual certificates, comparison and positivity checks"},
             {"report", "Every check requested by the scenario"}}) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, common);
        verbs.push_back(sub);
    }
    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep over a base scenario");
    std::string sweep_config, sweep_out = "sweep_out";
    std::vector<std::string> sweep_sets;
    sweep->add_option("--config", sweep_config, "Sweep JSON document")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", sweep_out, "Output directory");
    sweep->add_option("--set", sweep_sets, "Override a field of the sweep document: dotted.path=value");

    CLI11_PARSE(app, argc, argv);

    const int threads = worker_cap();
    omp_set_num_threads(threads);

    try {
        if (sweep->parsed()) {
            auto doc = nlkpp::io::read_json(sweep_config);
            nlkpp::apply_overrides(doc, sweep_sets);
            const auto base_dir = std::filesystem::path(sweep_config).parent_path();
            // Each worker gets one OpenMP thread so the pool does not oversubscribe.
            omp_set_num_threads(1);
            const auto r = nlkpp::cmd_sweep(doc, base_dir, sweep_out, threads);
            std::cout << "sweep: " << r.summary["runs"].size() << " runs, " << r.message << '\n';
            return r.exit_code;
        }
        for (auto* sub : verbs) {
            if (!sub->parsed()) continue;
            const auto doc = load(common);
            const auto scenario =
                nlkpp::scenario_from_json(doc, std::filesystem::path(common.config).parent_path());
            const auto r = nlkpp::run_verb(sub->get_name(), scenario);
            std::cout << sub->get_name() << ": " << r.message << " (exit " << r.exit_code << ", output "
                      << scenario.output.string() << ")\n";
            return r.exit_code;
        }
    } catch (const nlkpp::Error& e) {
        std::cerr << "error (" << nlkpp::to_string(e.kind()) << "): " << e.what() << '\n';
        return nlkpp::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nlkpp::exit_runtime_error;
    }
    return nlkpp::exit_runtime_error;
}
