// Markov jump linear system model: per-mode system matrices, a Markov
// chain over modes, and Gaussian noise. Provides validation, piecewise
// transition-matrix schedules, and ground-truth trajectory sampling.
//
// Dynamics, with theta_k the mode active while producing step k:
//   x_k = A(theta_k) x_{k-1} + B(theta_k) w_k,   w_k ~ N(0, W)
//   y_k = C(theta_k) x_k     + D(theta_k) v_k,   v_k ~ N(0, V)
// p0_mode is the distribution of a latent initial mode theta_0; theta_1
// already follows one chain transition (theta_0 ~ p0_mode, then
// theta_k | theta_{k-1} follows row theta_{k-1} of the matrix in force
// at step k, for every k >= 1).
#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "drgpb/errors.hpp"
#include "drgpb/linalg.hpp"
#include "drgpb/rng.hpp"

namespace drgpb {

struct MjlsModel {
    int n_x = 0;     ///< state dimension
    int n_y = 0;     ///< observation dimension
    int n_theta = 0; ///< number of modes

    std::vector<Mat> A; ///< per-mode state transition (n_x x n_x)
    std::vector<Mat> B; ///< per-mode process-noise gain (n_x x n_w)
    std::vector<Mat> C; ///< per-mode observation matrix (n_y x n_x)
    std::vector<Mat> D; ///< per-mode measurement-noise gain (n_y x n_v)

    Mat W;       ///< process-noise covariance (n_w x n_w)
    Mat V;       ///< measurement-noise covariance (n_v x n_v)
    Mat Pi;      ///< mode transition matrix, rows sum to 1 (n_theta x n_theta)
    Vec p0_mode; ///< distribution of theta_1
    Vec x0_mean; ///< initial state mean
    Mat X0;      ///< initial state covariance

    int n_w() const { return A.empty() ? 0 : static_cast<int>(B.front().cols()); }
    int n_v() const { return D.empty() ? 0 : static_cast<int>(D.front().cols()); }
};

// ============================================================================
// Validation
// ============================================================================

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }

    std::string to_string() const {
        if (ok()) return "model ok";
        std::ostringstream out;
        out << violations.size() << " violation(s):\n";
        for (const auto& v : violations) out << "  - " << v << "\n";
        return out.str();
    }
};

namespace detail {

inline void check_psd_matrix(const Mat& m, int dim, const std::string& name,
                             std::vector<std::string>& out) {
    if (m.rows() != dim || m.cols() != dim) {
        std::ostringstream s;
        s << name << " has shape " << m.rows() << "x" << m.cols()
          << ", expected " << dim << "x" << dim;
        out.push_back(s.str());
        return;
    }
    if (!is_symmetric(m, 1e-10)) {
        out.push_back(name + " not symmetric");
        return;
    }
    if (min_eigenvalue(m) < -1e-10) out.push_back(name + " not PSD");
}

inline void check_stochastic_matrix(const Mat& pi, int n, const std::string& name,
                                    std::vector<std::string>& out) {
    if (pi.rows() != n || pi.cols() != n) {
        std::ostringstream s;
        s << name << " has shape " << pi.rows() << "x" << pi.cols()
          << ", expected " << n << "x" << n;
        out.push_back(s.str());
        return;
    }
    for (int i = 0; i < n; ++i) {
        if (pi.row(i).minCoeff() < 0.0 || pi.row(i).maxCoeff() > 1.0) {
            out.push_back(name + " row " + std::to_string(i + 1) +
                          ": entry outside [0,1]");
        }
        double sum = pi.row(i).sum();
        if (std::abs(sum - 1.0) > 1e-12) {
            std::ostringstream s;
            s << name << " row " << i + 1 << ": row sum != 1 (got " << sum << ")";
            out.push_back(s.str());
        }
    }
}

} // namespace detail

/// Checks every model invariant and reports all violations at once.
inline ValidationReport validate_model(const MjlsModel& m) {
    ValidationReport rep;
    auto& out = rep.violations;

    if (m.n_x < 1) out.push_back("n_x must be >= 1");
    if (m.n_y < 1) out.push_back("n_y must be >= 1");
    if (m.n_theta < 1) out.push_back("n_theta must be >= 1");
    const auto nt = static_cast<size_t>(std::max(m.n_theta, 0));
    if (m.A.size() != nt || m.B.size() != nt || m.C.size() != nt || m.D.size() != nt)
        out.push_back("per-mode matrix lists must each have n_theta entries");
    if (!rep.ok()) return rep;

    const int n_w = m.n_w();
    const int n_v = m.n_v();
    for (int j = 0; j < m.n_theta; ++j) {
        const std::string tag = "mode " + std::to_string(j + 1);
        if (m.A[j].rows() != m.n_x || m.A[j].cols() != m.n_x)
            out.push_back(tag + ": A is not n_x x n_x");
        if (m.B[j].rows() != m.n_x || m.B[j].cols() != n_w)
            out.push_back(tag + ": B is not n_x x n_w");
        if (m.C[j].rows() != m.n_y || m.C[j].cols() != m.n_x)
            out.push_back(tag + ": C is not n_y x n_x");
        if (m.D[j].rows() != m.n_y || m.D[j].cols() != n_v)
            out.push_back(tag + ": D is not n_y x n_v");
    }

    detail::check_psd_matrix(m.W, n_w, "W", out);
    detail::check_psd_matrix(m.V, n_v, "V", out);
    detail::check_psd_matrix(m.X0, m.n_x, "X0", out);
    detail::check_stochastic_matrix(m.Pi, m.n_theta, "Pi", out);

    if (m.p0_mode.size() != m.n_theta) {
        out.push_back("p0_mode must have n_theta entries");
    } else {
        if (m.p0_mode.minCoeff() < 0.0) out.push_back("p0_mode has negative entry");
        if (std::abs(m.p0_mode.sum() - 1.0) > 1e-12) {
            std::ostringstream s;
            s << "p0_mode: sum != 1 (got " << m.p0_mode.sum() << ")";
            out.push_back(s.str());
        }
    }
    if (m.x0_mean.size() != m.n_x) out.push_back("x0_mean must have n_x entries");

    return rep;
}

/// Validates and throws ConfigError listing every violation.
inline void require_valid(const MjlsModel& m) {
    ValidationReport rep = validate_model(m);
    if (!rep.ok()) throw ConfigError("invalid model: " + rep.to_string());
}

// ============================================================================
// Piecewise transition-matrix schedule
// ============================================================================

struct PiSegment {
    int start = 1; ///< first step (inclusive) on which this matrix applies
    Mat pi;
};

/// Piecewise-constant transition matrix over time. Segment starts must be
/// strictly increasing with the first segment at step 1; the segment with
/// the largest start <= k is in force at step k.
class PiSchedule {
public:
    explicit PiSchedule(Mat constant_pi) {
        segments_.push_back({1, std::move(constant_pi)});
    }

    explicit PiSchedule(std::vector<PiSegment> segments)
        : segments_(std::move(segments)) {
        if (segments_.empty()) throw ConfigError("Pi schedule: no segments");
        if (segments_.front().start != 1)
            throw ConfigError("Pi schedule: first segment must start at step 1");
        for (size_t i = 1; i < segments_.size(); ++i) {
            if (segments_[i].start <= segments_[i - 1].start)
                throw ConfigError(
                    "Pi schedule: segment starts must be strictly increasing (got " +
                    std::to_string(segments_[i - 1].start) + " then " +
                    std::to_string(segments_[i].start) + ")");
        }
    }

    const Mat& at(int k) const {
        if (k < 1) throw ConfigError("Pi schedule queried at step < 1");
        size_t idx = 0;
        while (idx + 1 < segments_.size() && segments_[idx + 1].start <= k) ++idx;
        return segments_[idx].pi;
    }

    const std::vector<PiSegment>& segments() const { return segments_; }

    /// Segment starts after step 1, i.e. the interior breakpoints.
    std::vector<int> breakpoints() const {
        std::vector<int> b;
        for (size_t i = 1; i < segments_.size(); ++i) b.push_back(segments_[i].start);
        return b;
    }

private:
    std::vector<PiSegment> segments_;
};

/// A model whose transition matrix may vary over time. All other model
/// pieces are time-invariant; the schedule only overrides Pi.
class ScheduledModel {
public:
    ScheduledModel(MjlsModel model, PiSchedule schedule)
        : model_(std::move(model)), schedule_(std::move(schedule)) {
        for (const auto& seg : schedule_.segments()) {
            if (seg.pi.rows() != model_.n_theta || seg.pi.cols() != model_.n_theta)
                throw ConfigError("Pi schedule: segment matrix shape mismatch");
        }
    }

    explicit ScheduledModel(MjlsModel model)
        : model_(std::move(model)), schedule_(PiSchedule(model_.Pi)) {}

    const MjlsModel& model() const { return model_; }
    const Mat& pi_at(int k) const { return schedule_.at(k); }
    const PiSchedule& schedule() const { return schedule_; }

private:
    MjlsModel model_;
    PiSchedule schedule_;
};

// ============================================================================
// Trajectory sampling
// ============================================================================

struct Trajectory {
    int horizon = 0;
    std::vector<int> modes;        ///< theta_1..theta_N, 0-based mode indices
    std::vector<Vec> states;       ///< x_0..x_N (horizon + 1 entries)
    std::vector<Vec> observations; ///< y_1..y_N
};

namespace detail {

inline int sample_categorical(const Vec& p, double u) {
    double cum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        cum += p(i);
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(p.size() - 1); // cumulative roundoff
}

} // namespace detail

/// Samples one ground-truth trajectory. Pure function of
/// (model, schedule, horizon, seed, stream); identical inputs give
/// identical output. Draw order: initial-state normals, one uniform for
/// theta_0, then per step one uniform for the mode transition followed
/// by process- and measurement-noise normals.
inline Trajectory sample_trajectory(const MjlsModel& model, const PiSchedule& schedule,
                                    int horizon, std::uint64_t seed,
                                    std::uint64_t stream = 0) {
    require_valid(model);
    if (horizon < 1) throw ConfigError("sample_trajectory: horizon must be >= 1");

    const Mat sqrt_X0 = psd_sqrt(model.X0);
    const Mat sqrt_W = psd_sqrt(model.W);
    const Mat sqrt_V = psd_sqrt(model.V);

    auto rng = make_stream(seed, stream);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw_normal = [&](int n) {
        Vec z(n);
        for (int i = 0; i < n; ++i) z(i) = gauss(rng);
        return z;
    };

    Trajectory traj;
    traj.horizon = horizon;
    traj.modes.reserve(horizon);
    traj.states.reserve(horizon + 1);
    traj.observations.reserve(horizon);

    traj.states.push_back(model.x0_mean + sqrt_X0 * draw_normal(model.n_x));

    int mode = detail::sample_categorical(model.p0_mode, unif(rng));
    for (int k = 1; k <= horizon; ++k) {
        mode = detail::sample_categorical(schedule.at(k).row(mode).transpose(),
                                          unif(rng));
        traj.modes.push_back(mode);

        const Vec w = sqrt_W * draw_normal(model.n_w());
        const Vec v = sqrt_V * draw_normal(model.n_v());
        traj.states.push_back(model.A[mode] * traj.states.back() + model.B[mode] * w);
        traj.observations.push_back(model.C[mode] * traj.states.back() +
                                    model.D[mode] * v);
    }
    return traj;
}

inline Trajectory sample_trajectory(const MjlsModel& model, int horizon,
                                    std::uint64_t seed, std::uint64_t stream = 0) {
    return sample_trajectory(model, PiSchedule(model.Pi), horizon, seed, stream);
}

inline Trajectory sample_trajectory(const ScheduledModel& scheduled, int horizon,
                                    std::uint64_t seed, std::uint64_t stream = 0) {
    return sample_trajectory(scheduled.model(), scheduled.schedule(), horizon, seed,
                             stream);
}

} // namespace drgpb
