// The distributionally robust GPB recursion: each step re-seeds one
// Kalman filter per mode from the merged estimate, updates the nominal
// mode posterior, computes per-mode losses, replaces the posterior by its
// worst case over a total-variation ball, and merges the bank under the
// worst-case weights.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "drgpb/errors.hpp"
#include "drgpb/kalman.hpp"
#include "drgpb/linalg.hpp"
#include "drgpb/mode_posterior.hpp"
#include "drgpb/model.hpp"
#include "drgpb/tvd.hpp"

namespace drgpb {

struct FilterOptions {
    KfOptions kf;
    /// Floor applied to mu(j) before dividing in the loss trace(P)/mu; a
    /// floored mode gets a huge loss and attracts worst-case mass.
    double mu_floor = 1e-12;
    /// Relative tolerance for grouping equal losses into one level set.
    double tie_tol = 1e-9;
};

struct FilterState {
    int k = 0;                        ///< step index; 0 = initial state
    GaussianBelief merged;            ///< overall estimate (x_hat, P)
    Vec mu;                           ///< nominal posterior mode probabilities
    Vec nu_star;                      ///< worst-case mode probabilities
    double alpha = 0.0;               ///< mass moved onto the top level set
    std::vector<ModeStepOutput> bank; ///< per-mode filter diagnostics
    Vec losses;                       ///< per-mode trace(P)/mu (floored)
    double robust_value = 0.0;        ///< worst-case objective sum nu* L
};

/// Per-step ball radius R_TV(k): constant, piecewise-constant over
/// inclusive-start segments, or an explicit per-step list.
class RobustnessSchedule {
public:
    static RobustnessSchedule constant(double r) {
        RobustnessSchedule s;
        s.segments_ = {{1, check(r)}};
        return s;
    }

    /// r[k-1] applies at step k; steps beyond the list hold the last value.
    static RobustnessSchedule per_step(std::vector<double> r) {
        if (r.empty()) throw ConfigError("R_TV schedule: empty per-step list");
        RobustnessSchedule s;
        for (size_t i = 0; i < r.size(); ++i)
            s.segments_.push_back({static_cast<int>(i) + 1, check(r[i])});
        return s;
    }

    /// Segments of (first step, radius); starts strictly increasing from 1.
    static RobustnessSchedule piecewise(std::vector<std::pair<int, double>> seg) {
        if (seg.empty()) throw ConfigError("R_TV schedule: no segments");
        if (seg.front().first != 1)
            throw ConfigError("R_TV schedule: first segment must start at step 1");
        RobustnessSchedule s;
        for (size_t i = 0; i < seg.size(); ++i) {
            if (i > 0 && seg[i].first <= seg[i - 1].first)
                throw ConfigError(
                    "R_TV schedule: segment starts must be strictly increasing");
            s.segments_.push_back({seg[i].first, check(seg[i].second)});
        }
        return s;
    }

    double at(int k) const {
        if (k < 1) throw ConfigError("R_TV schedule queried at step < 1");
        size_t idx = 0;
        while (idx + 1 < segments_.size() && segments_[idx + 1].first <= k) ++idx;
        return segments_[idx].second;
    }

private:
    static double check(double r) {
        if (!(r >= 0.0 && r <= 1.0))
            throw ConfigError("R_TV schedule: radius must lie in [0, 1], got " +
                              std::to_string(r));
        return r;
    }

    std::vector<std::pair<int, double>> segments_;
};

/// Initial filter state: merged belief at the prior, mode distribution at
/// the initial mode distribution, no robustification applied yet.
inline FilterState init_filter(const MjlsModel& model) {
    require_valid(model);
    FilterState s;
    s.k = 0;
    s.merged = {model.x0_mean, model.X0};
    s.mu = model.p0_mode;
    s.nu_star = s.mu;
    s.alpha = 0.0;
    s.robust_value = 0.0;
    return s;
}

/// Per-mode losses L(j) = trace(P_j) / max(mu(j), floor).
inline Vec compute_mode_losses(const Vec& mu, const std::vector<Mat>& covariances,
                               double floor = 1e-12) {
    if (static_cast<size_t>(mu.size()) != covariances.size())
        throw ConfigError("compute_mode_losses: dimension mismatch");
    Vec L(mu.size());
    for (Eigen::Index j = 0; j < mu.size(); ++j)
        L(j) = covariances[static_cast<size_t>(j)].trace() /
               std::max(mu(j), floor);
    return L;
}

/// One DRGPB step with the transition matrix in force at this step.
/// Every mode filter is re-seeded from the previous merged estimate; the
/// merge applies the worst-case weights to both means and covariances,
/// including the spread term (x_hat - x_hat_j)(x_hat - x_hat_j)^T.
inline FilterState drgpb_step(const FilterState& state, const MjlsModel& model,
                              const Mat& Pi_k, const Vec& y, double R_TV_k,
                              const FilterOptions& opts = {}) {
    if (y.size() != model.n_y)
        throw ConfigError("drgpb_step: observation has wrong dimension");

    FilterState next;
    next.k = state.k + 1;

    next.bank.reserve(static_cast<size_t>(model.n_theta));
    Vec log_lik(model.n_theta);
    for (int j = 0; j < model.n_theta; ++j) {
        next.bank.push_back(kf_step(model, j, state.merged, y, opts.kf));
        log_lik(j) = next.bank.back().log_likelihood;
    }

    next.mu = update_mode_posterior(state.mu, Pi_k, log_lik);

    std::vector<Mat> covs;
    covs.reserve(next.bank.size());
    for (const auto& b : next.bank) covs.push_back(b.posterior.cov);
    next.losses = compute_mode_losses(next.mu, covs, opts.mu_floor);

    WaterfillResult wf =
        waterfill(next.mu, partition_levels(next.losses, opts.tie_tol), R_TV_k);
    next.nu_star = std::move(wf.nu_star);
    next.alpha = wf.alpha;
    next.robust_value = wf.value;

    Vec mean = Vec::Zero(model.n_x);
    for (int j = 0; j < model.n_theta; ++j)
        mean += next.nu_star(j) * next.bank[static_cast<size_t>(j)].posterior.mean;
    Mat cov = Mat::Zero(model.n_x, model.n_x);
    for (int j = 0; j < model.n_theta; ++j) {
        const auto& post = next.bank[static_cast<size_t>(j)].posterior;
        const Vec d = mean - post.mean;
        cov += next.nu_star(j) * (post.cov + d * d.transpose());
    }
    next.merged = {std::move(mean), symmetrize(cov)};
    return next;
}

inline FilterState drgpb_step(const FilterState& state, const MjlsModel& model,
                              const Vec& y, double R_TV_k,
                              const FilterOptions& opts = {}) {
    return drgpb_step(state, model, model.Pi, y, R_TV_k, opts);
}

/// Folds drgpb_step over an observation sequence, resolving the
/// transition matrix and radius per step. Returns the N post-update
/// states; failures carry the 1-based step index.
inline std::vector<FilterState> run_filter(const ScheduledModel& scheduled,
                                           const std::vector<Vec>& observations,
                                           const RobustnessSchedule& radii,
                                           const FilterOptions& opts = {}) {
    if (observations.empty())
        throw ConfigError("run_filter: empty observation sequence");

    std::vector<FilterState> trace;
    trace.reserve(observations.size());
    FilterState state = init_filter(scheduled.model());
    for (size_t i = 0; i < observations.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        try {
            state = drgpb_step(state, scheduled.model(), scheduled.pi_at(k),
                               observations[i], radii.at(k), opts);
        } catch (const NumericalError& e) {
            throw NumericalError("step " + std::to_string(k) + ": " + e.what());
        }
        trace.push_back(state);
    }
    return trace;
}

inline std::vector<FilterState> run_filter(const MjlsModel& model,
                                           const std::vector<Vec>& observations,
                                           const RobustnessSchedule& radii,
                                           const FilterOptions& opts = {}) {
    return run_filter(ScheduledModel(model), observations, radii, opts);
}

} // namespace drgpb
