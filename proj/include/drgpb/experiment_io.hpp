// File outputs of the Monte Carlo harness: metrics.csv (one row per
// run x radius x window), summary.json (aggregates and paired bootstrap
// comparisons), and per-run JSONL trace files.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "drgpb/errors.hpp"
#include "drgpb/experiment.hpp"
#include "drgpb/trace.hpp"

namespace drgpb {

/// Short label used in file names and summary keys, e.g. 0.05 -> "0.05".
inline std::string rtv_label(double rtv) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", rtv);
    return buf;
}

/// Columns: run (0-based), rtv, window, rmse, mode_id_rate_nu,
/// mode_id_rate_mu. Row order is (run, radius index, window index).
inline void write_metrics_csv(std::ostream& out, const ExperimentResult& result) {
    out << "run,rtv,window,rmse,mode_id_rate_nu,mode_id_rate_mu\n";
    for (const auto& rm : result.metrics) {
        for (size_t w = 0; w < result.windows.size(); ++w) {
            const auto& wm = rm.windows[w];
            out << rm.run << "," << detail::format_g17(rm.rtv) << ","
                << result.windows[w].label << "," << detail::format_g17(wm.rmse)
                << "," << detail::format_g17(wm.mode_id_rate_nu) << ","
                << detail::format_g17(wm.mode_id_rate_mu) << "\n";
        }
    }
}

inline nlohmann::json summary_to_json(const ExperimentResult& result,
                                      const RadiiComparison& cmp) {
    nlohmann::json j;
    j["schema"] = 1;
    j["runs"] = result.runs;
    j["horizon"] = result.horizon;
    j["seed"] = result.seed;
    j["bootstrap_resamples"] = result.bootstrap_resamples;
    j["rtv_grid"] = result.rtv_grid;

    nlohmann::json windows = nlohmann::json::array();
    for (const auto& w : result.windows) {
        nlohmann::json jw;
        jw["label"] = w.label;
        jw["start"] = w.start;
        jw["end"] = w.end;
        windows.push_back(std::move(jw));
    }
    j["windows"] = std::move(windows);

    nlohmann::json aggregates = nlohmann::json::array();
    for (const auto& row : cmp.aggregates) {
        nlohmann::json ja;
        ja["rtv"] = row.rtv;
        ja["window"] = row.window;
        ja["mean_rmse"] = row.mean_rmse;
        ja["median_rmse"] = row.median_rmse;
        ja["mean_mode_id_rate_nu"] = row.mean_mode_id_rate_nu;
        ja["mean_mode_id_rate_mu"] = row.mean_mode_id_rate_mu;
        aggregates.push_back(std::move(ja));
    }
    j["aggregates"] = std::move(aggregates);

    nlohmann::json paired = nlohmann::json::array();
    for (const auto& pd : cmp.paired) {
        nlohmann::json jp;
        jp["rtv"] = pd.rtv;
        jp["window"] = pd.window;
        jp["mean_diff_vs_zero"] = pd.mean_diff;
        jp["ci95_lo"] = pd.ci_lo;
        jp["ci95_hi"] = pd.ci_hi;
        jp["n_lower"] = pd.n_lower;
        jp["n_higher"] = pd.n_higher;
        jp["n_tied"] = pd.n_tied;
        paired.push_back(std::move(jp));
    }
    j["paired_vs_zero"] = std::move(paired);
    return j;
}

/// Writes metrics.csv and summary.json under `out_dir` (created if needed).
inline void write_experiment_outputs(const ExperimentResult& result,
                                     const RadiiComparison& cmp,
                                     const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    const auto metrics_path = std::filesystem::path(out_dir) / "metrics.csv";
    std::ofstream metrics(metrics_path);
    if (!metrics) throw IoError("cannot open " + metrics_path.string());
    write_metrics_csv(metrics, result);
    if (!metrics) throw IoError("failed writing " + metrics_path.string());

    const auto summary_path = std::filesystem::path(out_dir) / "summary.json";
    std::ofstream summary(summary_path);
    if (!summary) throw IoError("cannot open " + summary_path.string());
    summary << summary_to_json(result, cmp).dump(2) << "\n";
    if (!summary) throw IoError("failed writing " + summary_path.string());
}

/// Sink writing traces/run_<i>_rtv_<label>.jsonl under `out_dir`.
inline TraceSink make_jsonl_trace_sink(const std::string& out_dir) {
    const auto dir = std::filesystem::path(out_dir) / "traces";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    return [dir](int run, double rtv, const std::vector<FilterState>& trace,
                 const Trajectory& truth) {
        const auto path = dir / ("run_" + std::to_string(run) + "_rtv_" +
                                 rtv_label(rtv) + ".jsonl");
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path.string());
        write_trace_jsonl(out, trace, &truth);
        if (!out) throw IoError("failed writing " + path.string());
    };
}

} // namespace drgpb
