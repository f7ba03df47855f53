// JSON configuration and data files (schema version 1). Matrices are
// nested arrays of rows; mode indices are 1-based on disk and 0-based in
// memory. File-open failures raise IoError; malformed or out-of-schema
// content raises ConfigError.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "drgpb/errors.hpp"
#include "drgpb/filter.hpp"
#include "drgpb/linalg.hpp"
#include "drgpb/model.hpp"

namespace drgpb {

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing " + path);
}

inline void require_schema_1(const nlohmann::json& j, const std::string& what) {
    if (!j.is_object() || !j.contains("schema") || j["schema"] != 1)
        throw ConfigError(what + ": expected object with \"schema\": 1");
}

namespace detail {

inline Mat mat_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ConfigError(what + ": expected a nested array of rows");
    const auto rows = j.size();
    const auto cols = j.front().size();
    Mat m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError(what + ": ragged rows");
        for (size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number())
                throw ConfigError(what + ": non-numeric entry");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                j[r][c].get<double>();
        }
    }
    return m;
}

inline Vec vec_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError(what + ": expected an array");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(what + ": non-numeric entry");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline nlohmann::json mat_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json vec_to_json(const Vec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline std::vector<Mat> mode_mats_from_json(const nlohmann::json& j,
                                            const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ConfigError(what + ": expected one matrix per mode");
    std::vector<Mat> mats;
    mats.reserve(j.size());
    for (size_t m = 0; m < j.size(); ++m)
        mats.push_back(
            mat_from_json(j[m], what + "[" + std::to_string(m + 1) + "]"));
    return mats;
}

inline const nlohmann::json& field(const nlohmann::json& j, const std::string& key,
                                   const std::string& what) {
    if (!j.contains(key)) throw ConfigError(what + ": missing field \"" + key + "\"");
    return j[key];
}

} // namespace detail

/// Parses the "model" object: dimensions, per-mode A/B/C/D, W, V, Pi,
/// p0_mode, x0_mean, X0. The result is validated before return.
inline MjlsModel model_from_json(const nlohmann::json& j) {
    const std::string what = "model";
    if (!j.is_object()) throw ConfigError(what + ": expected an object");
    MjlsModel m;
    m.n_x = detail::field(j, "n_x", what).get<int>();
    m.n_y = detail::field(j, "n_y", what).get<int>();
    m.n_theta = detail::field(j, "n_theta", what).get<int>();
    m.A = detail::mode_mats_from_json(detail::field(j, "A", what), "model.A");
    m.B = detail::mode_mats_from_json(detail::field(j, "B", what), "model.B");
    m.C = detail::mode_mats_from_json(detail::field(j, "C", what), "model.C");
    m.D = detail::mode_mats_from_json(detail::field(j, "D", what), "model.D");
    m.W = detail::mat_from_json(detail::field(j, "W", what), "model.W");
    m.V = detail::mat_from_json(detail::field(j, "V", what), "model.V");
    m.Pi = detail::mat_from_json(detail::field(j, "Pi", what), "model.Pi");
    m.p0_mode = detail::vec_from_json(detail::field(j, "p0_mode", what),
                                      "model.p0_mode");
    m.x0_mean = detail::vec_from_json(detail::field(j, "x0_mean", what),
                                      "model.x0_mean");
    m.X0 = detail::mat_from_json(detail::field(j, "X0", what), "model.X0");

    ValidationReport rep = validate_model(m);
    if (!rep.ok()) throw ConfigError("model: " + rep.to_string());
    return m;
}

inline nlohmann::json model_to_json(const MjlsModel& m) {
    nlohmann::json j;
    j["n_x"] = m.n_x;
    j["n_y"] = m.n_y;
    j["n_theta"] = m.n_theta;
    auto mode_mats = [](const std::vector<Mat>& mats) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& mm : mats) arr.push_back(detail::mat_to_json(mm));
        return arr;
    };
    j["A"] = mode_mats(m.A);
    j["B"] = mode_mats(m.B);
    j["C"] = mode_mats(m.C);
    j["D"] = mode_mats(m.D);
    j["W"] = detail::mat_to_json(m.W);
    j["V"] = detail::mat_to_json(m.V);
    j["Pi"] = detail::mat_to_json(m.Pi);
    j["p0_mode"] = detail::vec_to_json(m.p0_mode);
    j["x0_mean"] = detail::vec_to_json(m.x0_mean);
    j["X0"] = detail::mat_to_json(m.X0);
    return j;
}

/// Parses a schedule array [{"start": k, "Pi": [[..]]}, ...].
inline PiSchedule pi_schedule_from_json(const nlohmann::json& j,
                                        const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ConfigError(what + ": expected a nonempty array of segments");
    std::vector<PiSegment> segments;
    segments.reserve(j.size());
    for (const auto& seg : j) {
        if (!seg.is_object())
            throw ConfigError(what + ": each segment must be an object");
        PiSegment s;
        s.start = detail::field(seg, "start", what).get<int>();
        s.pi = detail::mat_from_json(detail::field(seg, "Pi", what), what + ".Pi");
        segments.push_back(std::move(s));
    }
    return PiSchedule(std::move(segments));
}

inline nlohmann::json pi_schedule_to_json(const PiSchedule& schedule) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& seg : schedule.segments()) {
        nlohmann::json s;
        s["start"] = seg.start;
        s["Pi"] = detail::mat_to_json(seg.pi);
        arr.push_back(std::move(s));
    }
    return arr;
}

// ----------------------------------------------------------------------------
// Trajectory files
// ----------------------------------------------------------------------------

/// On disk: {"schema":1, "horizon":N, "modes":[1-based...],
/// "states":[[x_0],[x_1],...], "observations":[[y_1],...]}.
inline nlohmann::json trajectory_to_json(const Trajectory& t) {
    nlohmann::json j;
    j["schema"] = 1;
    j["horizon"] = t.horizon;
    nlohmann::json modes = nlohmann::json::array();
    for (int m : t.modes) modes.push_back(m + 1);
    j["modes"] = std::move(modes);
    nlohmann::json states = nlohmann::json::array();
    for (const auto& x : t.states) states.push_back(detail::vec_to_json(x));
    j["states"] = std::move(states);
    nlohmann::json obs = nlohmann::json::array();
    for (const auto& y : t.observations) obs.push_back(detail::vec_to_json(y));
    j["observations"] = std::move(obs);
    return j;
}

inline Trajectory trajectory_from_json(const nlohmann::json& j) {
    const std::string what = "trajectory";
    require_schema_1(j, what);
    Trajectory t;
    t.horizon = detail::field(j, "horizon", what).get<int>();
    for (const auto& m : detail::field(j, "modes", what)) {
        const int mode = m.get<int>() - 1;
        if (mode < 0) throw ConfigError(what + ": mode indices are 1-based");
        t.modes.push_back(mode);
    }
    for (const auto& x : detail::field(j, "states", what))
        t.states.push_back(detail::vec_from_json(x, what + ".states"));
    for (const auto& y : detail::field(j, "observations", what))
        t.observations.push_back(detail::vec_from_json(y, what + ".observations"));
    if (static_cast<int>(t.modes.size()) != t.horizon ||
        static_cast<int>(t.states.size()) != t.horizon + 1 ||
        static_cast<int>(t.observations.size()) != t.horizon)
        throw ConfigError(what + ": lengths inconsistent with horizon");
    return t;
}

// ----------------------------------------------------------------------------
// Experiment specification
// ----------------------------------------------------------------------------

struct ExperimentSpec {
    MjlsModel model;            ///< nominal model (Pi ignored when schedules given)
    PiSchedule true_pi{Mat()};  ///< generates the data
    PiSchedule nominal_pi{Mat()}; ///< what the filter believes
    int horizon = 0;
    std::vector<double> rtv_grid; ///< constant radii to compare (must include 0)
    int runs = 0;
    std::uint64_t seed = 0;
    int bootstrap_resamples = 1000;
    bool write_traces = false;
};

inline ExperimentSpec experiment_from_json(const nlohmann::json& j) {
    const std::string what = "experiment";
    require_schema_1(j, what);
    ExperimentSpec spec;
    spec.model = model_from_json(detail::field(j, "model", what));
    spec.true_pi = pi_schedule_from_json(
        detail::field(j, "true_pi_schedule", what), "true_pi_schedule");
    spec.nominal_pi = pi_schedule_from_json(
        detail::field(j, "nominal_pi_schedule", what), "nominal_pi_schedule");
    spec.horizon = detail::field(j, "horizon", what).get<int>();
    for (const auto& r : detail::field(j, "rtv_grid", what)) {
        if (!r.is_number()) throw ConfigError("rtv_grid: non-numeric entry");
        spec.rtv_grid.push_back(r.get<double>());
    }
    spec.runs = detail::field(j, "runs", what).get<int>();
    spec.seed = detail::field(j, "seed", what).get<std::uint64_t>();
    if (j.contains("bootstrap_resamples"))
        spec.bootstrap_resamples = j["bootstrap_resamples"].get<int>();
    if (j.contains("write_traces"))
        spec.write_traces = j["write_traces"].get<bool>();

    if (spec.horizon < 1) throw ConfigError("experiment: horizon must be >= 1");
    if (spec.runs < 1) throw ConfigError("experiment: runs must be >= 1");
    if (spec.bootstrap_resamples < 1)
        throw ConfigError("experiment: bootstrap_resamples must be >= 1");
    if (spec.rtv_grid.empty()) throw ConfigError("experiment: rtv_grid is empty");
    for (double r : spec.rtv_grid)
        if (!(r >= 0.0 && r <= 1.0))
            throw ConfigError("experiment: rtv_grid entries must lie in [0, 1]");
    for (const auto& seg : spec.true_pi.segments()) {
        ValidationReport rep;
        detail::check_stochastic_matrix(seg.pi, spec.model.n_theta,
                                        "true Pi schedule", rep.violations);
        if (!rep.ok()) throw ConfigError(rep.to_string());
    }
    for (const auto& seg : spec.nominal_pi.segments()) {
        ValidationReport rep;
        detail::check_stochastic_matrix(seg.pi, spec.model.n_theta,
                                        "nominal Pi schedule", rep.violations);
        if (!rep.ok()) throw ConfigError(rep.to_string());
    }
    return spec;
}

inline ExperimentSpec load_experiment(const std::string& path) {
    return experiment_from_json(load_json_file(path));
}

/// Loads a config that wraps a model: {"schema":1, "model": {...}}.
inline MjlsModel load_model(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    require_schema_1(j, path);
    return model_from_json(detail::field(j, "model", path));
}

} // namespace drgpb
