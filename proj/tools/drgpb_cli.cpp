// Command-line front end: validate model configs, sample trajectories,
// run single filters, run the Monte Carlo comparison harness, and
// cross-check the closed-form worst-case posterior against the LP oracle.
//
// Exit codes: 0 success, 2 bad configuration, 3 numerical failure,
// 4 I/O failure.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "drgpb/config.hpp"
#include "drgpb/errors.hpp"
#include "drgpb/experiment.hpp"
#include "drgpb/experiment_io.hpp"
#include "drgpb/filter.hpp"
#include "drgpb/model.hpp"
#include "drgpb/oracle.hpp"
#include "drgpb/rng.hpp"
#include "drgpb/trace.hpp"
#include "drgpb/tvd.hpp"

namespace {

int run_validate(const std::string& config_path) {
    nlohmann::json j = drgpb::load_json_file(config_path);
    drgpb::require_schema_1(j, config_path);
    if (!j.contains("model"))
        throw drgpb::ConfigError(config_path + ": missing \"model\"");
    // Parse without the throwing validation so the full report prints.
    drgpb::MjlsModel model;
    try {
        model = drgpb::model_from_json(j["model"]);
    } catch (const drgpb::ConfigError& e) {
        std::cout << e.what() << "\n";
        return 2;
    }
    std::cout << drgpb::validate_model(model).to_string() << "\n";
    return 0;
}

int run_simulate(const std::string& config_path, int horizon, std::uint64_t seed,
                 std::uint64_t stream, const std::string& out_path) {
    const drgpb::MjlsModel model = drgpb::load_model(config_path);
    const drgpb::Trajectory traj =
        drgpb::sample_trajectory(model, horizon, seed, stream);
    drgpb::save_json_file(out_path, drgpb::trajectory_to_json(traj));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int run_single_filter(const std::string& config_path,
                      const std::string& trajectory_path, double rtv,
                      const std::string& csv_path,
                      const std::string& jsonl_path) {
    const drgpb::MjlsModel model = drgpb::load_model(config_path);
    const drgpb::Trajectory traj =
        drgpb::trajectory_from_json(drgpb::load_json_file(trajectory_path));
    const auto trace = drgpb::run_filter(
        model, traj.observations, drgpb::RobustnessSchedule::constant(rtv));

    const bool has_truth = !traj.modes.empty();
    const drgpb::Trajectory* truth = has_truth ? &traj : nullptr;
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw drgpb::IoError("cannot open " + csv_path);
        drgpb::write_trace_csv(out, trace, truth);
        std::cout << "wrote " << csv_path << "\n";
    }
    if (!jsonl_path.empty()) {
        std::ofstream out(jsonl_path);
        if (!out) throw drgpb::IoError("cannot open " + jsonl_path);
        drgpb::write_trace_jsonl(out, trace, truth);
        std::cout << "wrote " << jsonl_path << "\n";
    }
    if (csv_path.empty() && jsonl_path.empty())
        drgpb::write_trace_csv(std::cout, trace, truth);
    return 0;
}

int run_experiment_cmd(const std::string& config_path, int runs_override,
                       std::int64_t seed_override,
                       const std::vector<double>& rtv_override,
                       std::string out_dir) {
    nlohmann::json j = drgpb::load_json_file(config_path);
    drgpb::ExperimentSpec spec = drgpb::experiment_from_json(j);
    if (runs_override > 0) spec.runs = runs_override;
    if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);
    if (!rtv_override.empty()) spec.rtv_grid = rtv_override;
    for (double r : spec.rtv_grid)
        if (!(r >= 0.0 && r <= 1.0))
            throw drgpb::ConfigError("rtv grid entries must lie in [0, 1]");
    if (out_dir.empty())
        out_dir = j.value("output_dir", std::string("out"));

    drgpb::TraceSink sink;
    if (spec.write_traces) sink = drgpb::make_jsonl_trace_sink(out_dir);
    const drgpb::ExperimentResult result = drgpb::run_experiment(spec, sink);
    const drgpb::RadiiComparison cmp = drgpb::compare_radii(result);
    drgpb::write_experiment_outputs(result, cmp, out_dir);

    std::printf("%d runs, horizon %d, seed %" PRIu64 "\n", result.runs,
                result.horizon, result.seed);
    for (const auto& row : cmp.aggregates)
        std::printf("rtv %-8s window %-9s mean RMSE %.6f  mode id (nu*) %.4f  "
                    "(mu) %.4f\n",
                    drgpb::rtv_label(row.rtv).c_str(), row.window.c_str(),
                    row.mean_rmse, row.mean_mode_id_rate_nu,
                    row.mean_mode_id_rate_mu);
    std::cout << "wrote " << out_dir << "/metrics.csv and summary.json\n";
    return 0;
}

struct CrosscheckInstance {
    drgpb::Vec mu;
    drgpb::Vec L;
    double rtv = 0.0;
};

CrosscheckInstance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick_n(2, 6);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = pick_n(rng);

    CrosscheckInstance inst;
    inst.mu.resize(n);
    for (int i = 0; i < n; ++i)
        inst.mu(i) = -std::log(std::max(unif(rng), 1e-300));
    // Occasionally zero some entries so empty-level paths get exercised.
    if (unif(rng) < 0.25) {
        const int kill = 1 + static_cast<int>(unif(rng) * (n - 1));
        for (int i = 0; i < kill; ++i)
            inst.mu(static_cast<int>(unif(rng) * n) % n) = 0.0;
        if (inst.mu.sum() == 0.0) inst.mu(0) = 1.0;
    }
    inst.mu /= inst.mu.sum();

    inst.L.resize(n);
    const bool force_ties = unif(rng) < 0.3;
    for (int i = 0; i < n; ++i) {
        double v = 10.0 * unif(rng);
        if (force_ties) v = std::round(v); // collide values into level sets
        inst.L(i) = v;
    }

    const double u = unif(rng);
    if (u < 0.1)
        inst.rtv = 0.0;
    else if (u < 0.2)
        inst.rtv = 1.0;
    else
        inst.rtv = unif(rng);
    return inst;
}

int run_crosscheck(int instances, std::uint64_t seed) {
    auto rng = drgpb::make_stream(seed, 0);
    double max_oracle_gap = 0.0;
    double max_equiv_gap = 0.0;
    double max_tvd_excess = 0.0;
    for (int i = 0; i < instances; ++i) {
        const CrosscheckInstance inst = random_instance(rng);
        const drgpb::WaterfillResult wf =
            drgpb::waterfill(inst.mu, inst.L, inst.rtv);
        const drgpb::OracleResult oracle =
            drgpb::brute_force_oracle(inst.mu, inst.L, inst.rtv);
        max_oracle_gap =
            std::max(max_oracle_gap, std::abs(wf.value - oracle.value));
        max_equiv_gap =
            std::max(max_equiv_gap, std::abs(wf.value - wf.value_equiv));
        max_tvd_excess =
            std::max(max_tvd_excess,
                     drgpb::tvd_distance(wf.nu_star, inst.mu) - inst.rtv);
    }
    std::printf("instances: %d\n", instances);
    std::printf("max |waterfill value - LP oracle value|: %.3e\n", max_oracle_gap);
    std::printf("max |value - equivalent-form value|:     %.3e\n", max_equiv_gap);
    std::printf("max TVD(nu*, mu) excess over radius:     %.3e\n",
                std::max(max_tvd_excess, 0.0));
    if (max_oracle_gap > 1e-9 || max_equiv_gap > 1e-9 || max_tvd_excess > 1e-12)
        throw drgpb::NumericalError("crosscheck deviation above tolerance");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust state and mode estimation for "
                 "Markov jump linear systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string trajectory_path;
    std::string out_path;
    std::string csv_path;
    std::string jsonl_path;
    std::string out_dir;
    int horizon = 100;
    std::int64_t seed_override = -1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    int runs_override = 0;
    int instances = 1000;
    double rtv = 0.0;
    std::vector<double> rtv_grid;

    auto* validate = app.add_subcommand("validate", "check a model config");
    validate->add_option("--config", config_path, "model config JSON")
        ->required();

    auto* simulate =
        app.add_subcommand("simulate", "sample a ground-truth trajectory");
    simulate->add_option("--config", config_path, "model config JSON")
        ->required();
    simulate->add_option("--horizon", horizon, "number of steps");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--stream", stream, "RNG stream index");
    simulate->add_option("--out", out_path, "trajectory output path")->required();

    auto* filter =
        app.add_subcommand("filter", "run the filter over a trajectory file");
    filter->add_option("--config", config_path, "model config JSON")->required();
    filter->add_option("--trajectory", trajectory_path, "trajectory JSON")
        ->required();
    filter->add_option("--rtv", rtv, "ambiguity radius in [0,1]");
    filter->add_option("--csv", csv_path, "trace CSV output path");
    filter->add_option("--jsonl", jsonl_path, "trace JSONL output path");

    auto* experiment =
        app.add_subcommand("experiment", "run the Monte Carlo comparison");
    experiment->add_option("--config", config_path, "experiment config JSON")
        ->required();
    experiment->add_option("--runs", runs_override, "override run count");
    experiment->add_option("--seed", seed_override, "override base seed");
    experiment->add_option("--rtv", rtv_grid, "override radius grid")
        ->delimiter(',');
    experiment->add_option("--out", out_dir, "output directory");

    auto* crosscheck = app.add_subcommand(
        "crosscheck", "water-filling vs LP oracle on random instances");
    crosscheck->add_option("--instances", instances, "instance count");
    crosscheck->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*validate) return run_validate(config_path);
        if (*simulate)
            return run_simulate(config_path, horizon, seed, stream, out_path);
        if (*filter)
            return run_single_filter(config_path, trajectory_path, rtv, csv_path,
                                     jsonl_path);
        if (*experiment)
            return run_experiment_cmd(config_path, runs_override, seed_override,
                                      rtv_grid, out_dir);
        if (*crosscheck) return run_crosscheck(instances, seed);
    } catch (const drgpb::ConfigError& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return 2;
    } catch (const drgpb::IoError& e) {
        std::cerr << "error (io): " << e.what() << "\n";
        return 4;
    } catch (const drgpb::NumericalError& e) {
        std::cerr << "error (numerical): " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
