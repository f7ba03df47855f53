// Filter trace export: one record per step carrying the merged estimate,
// covariance diagonal, nominal and worst-case mode probabilities, and the
// ground truth when available. CSV and JSON-lines writers share the same
// record layout; numbers are written in full double precision so outputs
// are byte-stable across runs.
#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "drgpb/errors.hpp"
#include "drgpb/filter.hpp"
#include "drgpb/model.hpp"

namespace drgpb {

namespace detail {

/// 17 significant digits: enough to round-trip any double exactly.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// CSV columns, in order: k, xhat_1..xhat_nx, P_diag_1..P_diag_nx,
/// mu_1..mu_ntheta, nu_star_1..nu_star_ntheta, alpha, and, when truth is
/// supplied, true_mode (1-based), true_x_1..true_x_nx.
inline void write_trace_csv(std::ostream& out,
                            const std::vector<FilterState>& trace,
                            const Trajectory* truth = nullptr) {
    if (trace.empty()) throw ConfigError("write_trace_csv: empty trace");
    const auto n_x = trace.front().merged.mean.size();
    const auto n_theta = trace.front().mu.size();
    if (truth && static_cast<int>(truth->modes.size()) < trace.back().k)
        throw ConfigError("write_trace_csv: truth shorter than trace");

    out << "k";
    for (Eigen::Index i = 0; i < n_x; ++i) out << ",xhat_" << i + 1;
    for (Eigen::Index i = 0; i < n_x; ++i) out << ",P_diag_" << i + 1;
    for (Eigen::Index j = 0; j < n_theta; ++j) out << ",mu_" << j + 1;
    for (Eigen::Index j = 0; j < n_theta; ++j) out << ",nu_star_" << j + 1;
    out << ",alpha";
    if (truth) {
        out << ",true_mode";
        for (Eigen::Index i = 0; i < n_x; ++i) out << ",true_x_" << i + 1;
    }
    out << "\n";

    for (const auto& s : trace) {
        out << s.k;
        for (Eigen::Index i = 0; i < n_x; ++i)
            out << "," << detail::format_g17(s.merged.mean(i));
        for (Eigen::Index i = 0; i < n_x; ++i)
            out << "," << detail::format_g17(s.merged.cov(i, i));
        for (Eigen::Index j = 0; j < n_theta; ++j)
            out << "," << detail::format_g17(s.mu(j));
        for (Eigen::Index j = 0; j < n_theta; ++j)
            out << "," << detail::format_g17(s.nu_star(j));
        out << "," << detail::format_g17(s.alpha);
        if (truth) {
            out << "," << truth->modes[static_cast<size_t>(s.k - 1)] + 1;
            const Vec& x = truth->states[static_cast<size_t>(s.k)];
            for (Eigen::Index i = 0; i < n_x; ++i)
                out << "," << detail::format_g17(x(i));
        }
        out << "\n";
    }
}

/// One JSON object per line with keys (alphabetical on output): P_diag,
/// alpha, k, mu, nu_star, xhat, plus true_mode/true_x when truth is given.
inline void write_trace_jsonl(std::ostream& out,
                              const std::vector<FilterState>& trace,
                              const Trajectory* truth = nullptr) {
    if (trace.empty()) throw ConfigError("write_trace_jsonl: empty trace");
    if (truth && static_cast<int>(truth->modes.size()) < trace.back().k)
        throw ConfigError("write_trace_jsonl: truth shorter than trace");

    for (const auto& s : trace) {
        nlohmann::json rec;
        rec["k"] = s.k;
        rec["xhat"] = std::vector<double>(s.merged.mean.begin(),
                                          s.merged.mean.end());
        const Vec p_diag = s.merged.cov.diagonal();
        rec["P_diag"] = std::vector<double>(p_diag.begin(), p_diag.end());
        rec["mu"] = std::vector<double>(s.mu.begin(), s.mu.end());
        rec["nu_star"] = std::vector<double>(s.nu_star.begin(), s.nu_star.end());
        rec["alpha"] = s.alpha;
        if (truth) {
            rec["true_mode"] = truth->modes[static_cast<size_t>(s.k - 1)] + 1;
            const Vec& x = truth->states[static_cast<size_t>(s.k)];
            rec["true_x"] = std::vector<double>(x.begin(), x.end());
        }
        out << rec.dump() << "\n";
    }
}

} // namespace drgpb
