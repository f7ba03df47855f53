// Posterior mode-probability recursion: Markov prediction of the mode
// prior followed by a Bayes update with per-mode observation likelihoods,
// stabilized in the log domain.
#pragma once

#include <cmath>
#include <limits>

#include "drgpb/errors.hpp"
#include "drgpb/linalg.hpp"

namespace drgpb {

/// One Markov-chain prediction: p(theta_k = j | y_{1:k-1}) =
/// sum_i Pi(i,j) mu_prev(i).
inline Vec predict_mode_prior(const Vec& mu_prev, const Mat& Pi) {
    if (Pi.rows() != mu_prev.size() || Pi.cols() != mu_prev.size())
        throw ConfigError("predict_mode_prior: dimension mismatch");
    return Pi.transpose() * mu_prev;
}

/// Bayes update of the mode distribution:
///   mu_k(j) proportional to exp(log_likelihoods(j)) * [Pi^T mu_prev](j),
/// normalized. Computed with log-sum-exp so that uniformly tiny
/// likelihoods cancel; shifting all log-likelihoods by a constant leaves
/// the result unchanged. Throws NumericalError when every mode has zero
/// posterior weight (all likelihoods -inf on the prior's support).
inline Vec update_mode_posterior(const Vec& mu_prev, const Mat& Pi,
                                 const Vec& log_likelihoods) {
    const Vec prior = predict_mode_prior(mu_prev, Pi);
    if (log_likelihoods.size() != prior.size())
        throw ConfigError("update_mode_posterior: dimension mismatch");

    const auto n = prior.size();
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    Vec score(n);
    double top = neg_inf;
    for (Eigen::Index j = 0; j < n; ++j) {
        score(j) = prior(j) > 0.0 ? log_likelihoods(j) + std::log(prior(j))
                                  : neg_inf;
        if (std::isnan(score(j)))
            throw NumericalError("update_mode_posterior: NaN likelihood");
        top = std::max(top, score(j));
    }
    if (top == neg_inf)
        throw NumericalError(
            "update_mode_posterior: degenerate evidence, all mode weights vanished");

    Vec w(n);
    for (Eigen::Index j = 0; j < n; ++j) w(j) = std::exp(score(j) - top);
    return w / w.sum();
}

} // namespace drgpb
