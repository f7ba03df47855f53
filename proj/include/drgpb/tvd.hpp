// Worst-case mode posterior over a total-variation ball, in closed form:
// partition modes into level sets of equal loss, move mass alpha from the
// lowest-loss sets onto the top set (water-filling), and evaluate the
// resulting worst-case objective both directly and via the equivalent
// case-split formula. A brute-force LP oracle for these lives in
// oracle.hpp so the two routes stay independent.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "drgpb/errors.hpp"
#include "drgpb/linalg.hpp"

namespace drgpb {

/// Total variation distance (1/2) sum |p - q| between distributions.
inline double tvd_distance(const Vec& p, const Vec& q) {
    if (p.size() != q.size())
        throw ConfigError("tvd_distance: length mismatch");
    return 0.5 * (p - q).cwiseAbs().sum();
}

/// A maximal group of modes whose losses agree within the tie tolerance.
struct LevelSet {
    std::vector<int> members;
    double L = 0.0; ///< representative loss (max over members)
};

/// Modes grouped by loss value: `theta_top` holds the maximizers, `levels`
/// the remaining groups in ascending loss order (levels.front() is the
/// minimum-loss set). `levels` is empty iff all losses tie.
struct LevelPartition {
    std::vector<int> theta_top;
    double L_max = 0.0;
    std::vector<LevelSet> levels;
    Vec L_values; ///< the per-mode losses the partition was built from
};

/// Groups modes whose losses are equal within `tie_tol` (relative, with an
/// absolute guard near zero) by chaining adjacent values in sorted order.
inline LevelPartition partition_levels(const Vec& L, double tie_tol = 1e-9) {
    const auto n = L.size();
    if (n == 0) throw ConfigError("partition_levels: empty loss vector");
    for (Eigen::Index j = 0; j < n; ++j)
        if (!std::isfinite(L(j)))
            throw NumericalError("partition_levels: non-finite loss at mode " +
                                 std::to_string(j + 1));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return L(a) < L(b) || (L(a) == L(b) && a < b);
    });

    std::vector<LevelSet> groups;
    for (int idx : order) {
        const bool tie = !groups.empty() &&
                         L(idx) - groups.back().L <=
                             tie_tol * std::max(1.0, std::abs(L(idx)));
        if (!tie) groups.push_back({});
        groups.back().members.push_back(idx);
        groups.back().L = L(idx); // ascending scan, so max so far
    }

    LevelPartition part;
    part.L_values = L;
    part.theta_top = std::move(groups.back().members);
    part.L_max = groups.back().L;
    groups.pop_back();
    part.levels = std::move(groups);
    return part;
}

enum class RobustCase {
    one, ///< alpha drains only the minimum-loss set
    two  ///< alpha reaches into level set z
};

/// Output of the equivalent-form evaluation of the worst-case objective.
struct RobustValue {
    double value = 0.0;
    RobustCase case_tag = RobustCase::one;
    int z = 0; ///< level index reached by the drain (0 under case one)
    double beta = 0.0;
};

/// Evaluates the worst-case objective without constructing nu_star:
///   value = sum_j mu(j) L(j) + beta(alpha) + alpha (L_max - L_z)
/// where z is the level the drain reaches (cum_{z-1} <= alpha <= cum_z)
/// and beta accumulates the loss gaps of the fully drained lower sets.
/// Boundary ties resolve to the smaller case. `alpha` must come from the
/// water-filling clamp for this mu/partition (alpha <= 1 - mu(theta_top)).
inline RobustValue robust_value_equivalent(const Vec& mu,
                                           const LevelPartition& part,
                                           double alpha) {
    if (mu.size() != part.L_values.size())
        throw ConfigError("robust_value_equivalent: dimension mismatch");

    RobustValue out;
    const double nominal = mu.dot(part.L_values);

    if (part.levels.empty()) {
        // All losses tie: the objective is flat and alpha is clamped to 0.
        out.value = nominal;
        return out;
    }

    auto set_mass = [&](const LevelSet& s) {
        double m = 0.0;
        for (int j : s.members) m += mu(j);
        return m;
    };

    const int r = static_cast<int>(part.levels.size()) - 1;
    std::vector<double> cum(part.levels.size());
    double acc = 0.0;
    for (int s = 0; s <= r; ++s) {
        acc += set_mass(part.levels[s]);
        cum[static_cast<size_t>(s)] = acc;
    }

    // Smallest level whose cumulative mass covers alpha; the topmost level
    // gets 1e-12 slack since alpha <= 1 - mu(theta_top) only up to roundoff.
    int z = -1;
    for (int s = 0; s <= r; ++s) {
        const double slack = (s == r) ? 1e-12 : 0.0;
        if (alpha <= cum[static_cast<size_t>(s)] + slack) {
            z = s;
            break;
        }
    }
    if (z < 0)
        throw NumericalError(
            "robust_value_equivalent: no case matched (alpha exceeds drainable mass)");

    if (z == 0) {
        out.value = nominal + alpha * (part.L_max - part.levels.front().L);
        return out;
    }
    double beta = 0.0;
    for (int s = 0; s < z; ++s)
        beta += (part.levels[static_cast<size_t>(z)].L -
                 part.levels[static_cast<size_t>(s)].L) *
                set_mass(part.levels[static_cast<size_t>(s)]);
    out.case_tag = RobustCase::two;
    out.z = z;
    out.beta = beta;
    out.value =
        nominal + beta + alpha * (part.L_max - part.levels[static_cast<size_t>(z)].L);
    return out;
}

/// Closed-form worst-case posterior and objective value.
struct WaterfillResult {
    Vec nu_star;
    double alpha = 0.0;
    LevelPartition partition;
    double value = 0.0;       ///< sum_j nu_star(j) L(j)
    double value_equiv = 0.0; ///< case-split evaluation of the same quantity
    RobustCase case_tag = RobustCase::one;
    int case_z = 0;
    double beta = 0.0;
};

/// Worst-case distribution over the TV ball of radius `R_TV` around `mu`:
///   alpha        = min(R_TV, 1 - mu(theta_top)), clamped at 0
///   nu*(top)     = mu(top) + alpha
///   lower sets   drained in ascending loss order until alpha is spent.
/// Set-level mass is spread over members proportionally to mu (equal
/// shares when a set carries nu mass but no mu mass, which only happens
/// for the top set). R_TV = 0 returns nu_star = mu exactly.
inline WaterfillResult waterfill(const Vec& mu, LevelPartition partition,
                                 double R_TV) {
    if (!(R_TV >= 0.0 && R_TV <= 1.0))
        throw ConfigError("waterfill: R_TV must lie in [0, 1], got " +
                          std::to_string(R_TV));
    if (mu.size() != partition.L_values.size())
        throw ConfigError("waterfill: dimension mismatch");

    WaterfillResult res;
    res.nu_star = Vec::Zero(mu.size());

    auto set_mass = [&](const std::vector<int>& members) {
        double m = 0.0;
        for (int j : members) m += mu(j);
        return m;
    };
    auto allocate = [&](const std::vector<int>& members, double mu_set,
                        double nu_set) {
        if (nu_set <= 0.0) {
            for (int j : members) res.nu_star(j) = 0.0;
        } else if (mu_set > 0.0) {
            const double scale = nu_set / mu_set; // exactly 1.0 when masses agree
            for (int j : members) res.nu_star(j) = mu(j) * scale;
        } else {
            const double share = nu_set / static_cast<double>(members.size());
            for (int j : members) res.nu_star(j) = share;
        }
    };

    const double mu_top = set_mass(partition.theta_top);
    res.alpha = std::max(0.0, std::min(R_TV, 1.0 - mu_top));
    allocate(partition.theta_top, mu_top, mu_top + res.alpha);

    double drained = 0.0; // mass removed from the sets below the current one
    for (const auto& level : partition.levels) {
        const double m = set_mass(level.members);
        const double take = std::max(0.0, res.alpha - drained);
        allocate(level.members, m, std::max(0.0, m - take));
        drained += m;
    }

    res.value = res.nu_star.dot(partition.L_values);
    const RobustValue eq = robust_value_equivalent(mu, partition, res.alpha);
    res.value_equiv = eq.value;
    res.case_tag = eq.case_tag;
    res.case_z = eq.z;
    res.beta = eq.beta;
    res.partition = std::move(partition);
    return res;
}

inline WaterfillResult waterfill(const Vec& mu, const Vec& L, double R_TV,
                                 double tie_tol = 1e-9) {
    return waterfill(mu, partition_levels(L, tie_tol), R_TV);
}

} // namespace drgpb
