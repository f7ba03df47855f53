// Monte Carlo harness: sample trajectories under the true transition
// schedule, filter them under the nominal schedule for every radius in a
// grid, score per-window estimation error and mode identification, and
// compare each positive radius against the classical (radius 0) filter
// with paired differences and a percentile bootstrap.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "drgpb/config.hpp"
#include "drgpb/errors.hpp"
#include "drgpb/filter.hpp"
#include "drgpb/model.hpp"
#include "drgpb/rng.hpp"

namespace drgpb {

/// Inclusive step range [start, end] with a stable label such as "30-69";
/// the synthetic "all" window covers the whole horizon.
struct WindowSpec {
    std::string label;
    int start = 1;
    int end = 1;

    bool contains(int k) const { return k >= start && k <= end; }
};

/// Windows between consecutive schedule breakpoints (union of the true
/// and nominal segment starts), plus the whole-horizon window.
inline std::vector<WindowSpec> derive_windows(const PiSchedule& true_pi,
                                              const PiSchedule& nominal_pi,
                                              int horizon) {
    std::set<int> starts = {1};
    for (int b : true_pi.breakpoints())
        if (b <= horizon) starts.insert(b);
    for (int b : nominal_pi.breakpoints())
        if (b <= horizon) starts.insert(b);

    std::vector<int> sorted(starts.begin(), starts.end());
    std::vector<WindowSpec> windows;
    for (size_t i = 0; i < sorted.size(); ++i) {
        WindowSpec w;
        w.start = sorted[i];
        w.end = (i + 1 < sorted.size()) ? sorted[i + 1] - 1 : horizon;
        w.label = std::to_string(w.start) + "-" + std::to_string(w.end);
        windows.push_back(std::move(w));
    }
    if (windows.size() > 1)
        windows.push_back({"all", 1, horizon});
    return windows;
}

struct WindowMetrics {
    double rmse = 0.0;            ///< sqrt(mean ||x_k - xhat_k||^2) over window
    double mode_id_rate_nu = 0.0; ///< fraction of steps argmax nu* hits true mode
    double mode_id_rate_mu = 0.0; ///< same for argmax mu
};

struct RunMetrics {
    int run = 0;    ///< 0-based Monte Carlo run index (also its RNG stream)
    double rtv = 0.0;
    std::vector<WindowMetrics> windows; ///< parallel to the window list
};

struct ExperimentResult {
    std::vector<WindowSpec> windows;
    std::vector<double> rtv_grid;
    std::vector<RunMetrics> metrics; ///< ordered by (run, radius index)
    int runs = 0;
    int horizon = 0;
    std::uint64_t seed = 0;
    int bootstrap_resamples = 1000;
};

namespace detail {

inline int argmax_first(const Vec& v) {
    int best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(best)) best = static_cast<int>(i);
    return best;
}

inline WindowMetrics score_window(const WindowSpec& w,
                                  const std::vector<FilterState>& trace,
                                  const Trajectory& truth) {
    WindowMetrics m;
    double sum_sq = 0.0;
    int hits_nu = 0;
    int hits_mu = 0;
    int count = 0;
    for (const auto& s : trace) {
        if (!w.contains(s.k)) continue;
        const Vec err = truth.states[static_cast<size_t>(s.k)] - s.merged.mean;
        sum_sq += err.squaredNorm();
        const int true_mode = truth.modes[static_cast<size_t>(s.k - 1)];
        hits_nu += argmax_first(s.nu_star) == true_mode ? 1 : 0;
        hits_mu += argmax_first(s.mu) == true_mode ? 1 : 0;
        ++count;
    }
    if (count == 0) return m;
    m.rmse = std::sqrt(sum_sq / count);
    m.mode_id_rate_nu = static_cast<double>(hits_nu) / count;
    m.mode_id_rate_mu = static_cast<double>(hits_mu) / count;
    return m;
}

} // namespace detail

/// Called once per (run, radius) with the full filter trace and the
/// ground-truth trajectory, before they are discarded.
using TraceSink = std::function<void(int run, double rtv,
                                     const std::vector<FilterState>&,
                                     const Trajectory&)>;

/// Runs the full Monte Carlo study. Run i draws its trajectory from RNG
/// stream i of the base seed, so results are independent of execution
/// order; all radii see the same trajectories (paired design).
inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       const TraceSink& sink = {},
                                       const FilterOptions& opts = {}) {
    ExperimentResult result;
    result.windows = derive_windows(spec.true_pi, spec.nominal_pi, spec.horizon);
    result.rtv_grid = spec.rtv_grid;
    result.runs = spec.runs;
    result.horizon = spec.horizon;
    result.seed = spec.seed;
    result.bootstrap_resamples = spec.bootstrap_resamples;
    result.metrics.reserve(static_cast<size_t>(spec.runs) *
                           spec.rtv_grid.size());

    const ScheduledModel believed(spec.model, spec.nominal_pi);
    for (int run = 0; run < spec.runs; ++run) {
        Trajectory traj;
        try {
            traj = sample_trajectory(spec.model, spec.true_pi, spec.horizon,
                                     spec.seed, static_cast<std::uint64_t>(run));
        } catch (const NumericalError& e) {
            throw NumericalError("run " + std::to_string(run) + ": " + e.what());
        }
        for (double rtv : spec.rtv_grid) {
            std::vector<FilterState> trace;
            try {
                trace = run_filter(believed, traj.observations,
                                   RobustnessSchedule::constant(rtv), opts);
            } catch (const NumericalError& e) {
                throw NumericalError("run " + std::to_string(run) + ", rtv " +
                                     std::to_string(rtv) + ": " + e.what());
            }
            RunMetrics rm;
            rm.run = run;
            rm.rtv = rtv;
            for (const auto& w : result.windows)
                rm.windows.push_back(detail::score_window(w, trace, traj));
            result.metrics.push_back(std::move(rm));
            if (sink) sink(run, rtv, trace, traj);
        }
    }
    return result;
}

// ----------------------------------------------------------------------------
// Cross-radius comparison
// ----------------------------------------------------------------------------

struct AggregateRow {
    double rtv = 0.0;
    std::string window;
    double mean_rmse = 0.0;
    double median_rmse = 0.0;
    double mean_mode_id_rate_nu = 0.0;
    double mean_mode_id_rate_mu = 0.0;
};

/// Paired per-run comparison of one positive radius against radius 0.
struct PairedDiff {
    double rtv = 0.0;
    std::string window;
    double mean_diff = 0.0; ///< mean over runs of rmse(rtv) - rmse(0)
    double ci_lo = 0.0;     ///< percentile bootstrap 2.5%
    double ci_hi = 0.0;     ///< percentile bootstrap 97.5%
    int n_lower = 0;        ///< runs where the positive radius won
    int n_higher = 0;
    int n_tied = 0;
};

struct RadiiComparison {
    std::vector<AggregateRow> aggregates; ///< one per (radius, window)
    std::vector<PairedDiff> paired;       ///< one per (positive radius, window)
};

namespace detail {

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Linearly interpolated quantile of a sorted sample, q in [0, 1].
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

} // namespace detail

/// Requires the grid to contain radius 0 (the classical baseline). The
/// bootstrap resamples run indices with replacement on a dedicated RNG
/// stream of the experiment seed, in a fixed (radius, window) order.
inline RadiiComparison compare_radii(const ExperimentResult& result) {
    constexpr std::uint64_t bootstrap_stream = 0xb00757u;
    const auto n_windows = result.windows.size();
    const auto n_radii = result.rtv_grid.size();
    const auto runs = static_cast<size_t>(result.runs);

    auto zero_it = std::find(result.rtv_grid.begin(), result.rtv_grid.end(), 0.0);
    if (zero_it == result.rtv_grid.end())
        throw ConfigError("compare_radii: rtv_grid must contain 0");
    const size_t zero_idx =
        static_cast<size_t>(zero_it - result.rtv_grid.begin());

    // metrics is ordered by (run, radius index)
    auto rmse_at = [&](size_t run, size_t radius, size_t window) {
        return result.metrics[run * n_radii + radius].windows[window].rmse;
    };

    RadiiComparison cmp;
    for (size_t r = 0; r < n_radii; ++r) {
        for (size_t w = 0; w < n_windows; ++w) {
            AggregateRow row;
            row.rtv = result.rtv_grid[r];
            row.window = result.windows[w].label;
            std::vector<double> rmses(runs);
            for (size_t i = 0; i < runs; ++i) {
                const auto& wm = result.metrics[i * n_radii + r].windows[w];
                rmses[i] = wm.rmse;
                row.mean_rmse += wm.rmse;
                row.mean_mode_id_rate_nu += wm.mode_id_rate_nu;
                row.mean_mode_id_rate_mu += wm.mode_id_rate_mu;
            }
            row.mean_rmse /= static_cast<double>(runs);
            row.mean_mode_id_rate_nu /= static_cast<double>(runs);
            row.mean_mode_id_rate_mu /= static_cast<double>(runs);
            row.median_rmse = detail::median_of(std::move(rmses));
            cmp.aggregates.push_back(std::move(row));
        }
    }

    auto rng = make_stream(result.seed, bootstrap_stream);
    std::uniform_int_distribution<size_t> pick(0, runs - 1);
    for (size_t r = 0; r < n_radii; ++r) {
        if (r == zero_idx) continue;
        for (size_t w = 0; w < n_windows; ++w) {
            PairedDiff pd;
            pd.rtv = result.rtv_grid[r];
            pd.window = result.windows[w].label;
            std::vector<double> diffs(runs);
            for (size_t i = 0; i < runs; ++i) {
                diffs[i] = rmse_at(i, r, w) - rmse_at(i, zero_idx, w);
                pd.mean_diff += diffs[i];
                if (diffs[i] < 0.0)
                    ++pd.n_lower;
                else if (diffs[i] > 0.0)
                    ++pd.n_higher;
                else
                    ++pd.n_tied;
            }
            pd.mean_diff /= static_cast<double>(runs);

            std::vector<double> means(
                static_cast<size_t>(result.bootstrap_resamples));
            for (auto& m : means) {
                double acc = 0.0;
                for (size_t i = 0; i < runs; ++i) acc += diffs[pick(rng)];
                m = acc / static_cast<double>(runs);
            }
            std::sort(means.begin(), means.end());
            pd.ci_lo = detail::quantile_sorted(means, 0.025);
            pd.ci_hi = detail::quantile_sorted(means, 0.975);
            cmp.paired.push_back(std::move(pd));
        }
    }
    return cmp;
}

} // namespace drgpb
