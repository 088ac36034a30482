#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncs/scheduler.hpp"
#include "ncs/sim.hpp"

namespace ncs {

/// One subsystem's fully validated run setup.
struct SubsystemConfig {
    std::string name;
    PlantModel model;
    CostWeights weights;
    int tau = 0;
};

struct SweepSpec {
    std::string family;  // "voip" | "periodic" | "aoi"
    std::vector<double> theta_grid;
    std::vector<int> period_grid;
    std::vector<int> threshold_grid;
};

struct RunConfig {
    std::vector<SubsystemConfig> subsystems;
    int T = 0;
    int trials = 1;
    std::uint64_t seed = 0;
    SchedulerPolicy policy;
    std::optional<SweepSpec> sweep;
};

namespace detail {

inline Matrix parse_matrix(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("config: field '" + field + "' must be a non-empty matrix (array of rows)");
    // accept a bare number as a 1x1 matrix and a flat array as a column
    const nlohmann::json rows = j[0].is_array() ? j : nlohmann::json::array({j});
    const auto nr = rows.size();
    const auto nc = rows[0].size();
    Matrix M(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
    for (std::size_t i = 0; i < nr; ++i) {
        if (rows[i].size() != nc)
            throw std::invalid_argument("config: field '" + field + "' has ragged rows");
        for (std::size_t c = 0; c < nc; ++c) {
            if (!rows[i][c].is_number())
                throw std::invalid_argument("config: field '" + field + "' must contain numbers");
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c].get<double>();
        }
    }
    return M;
}

inline void warn_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                              const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            std::cerr << "warning: unknown config key '" << it.key() << "' in " << where << "\n";
}

}  // namespace detail

inline PolicyKind parse_policy_kind(const std::string& s) {
    if (s == "voip") return PolicyKind::VoIProxy;
    if (s == "classic-voi") return PolicyKind::ClassicVoI;
    if (s == "aoi") return PolicyKind::AoIThreshold;
    if (s == "periodic") return PolicyKind::Periodic;
    if (s == "dp") return PolicyKind::DPOracle;
    throw std::invalid_argument("config: unknown policy kind '" + s +
                                "' (expected voip|classic-voi|aoi|periodic|dp)");
}

inline VoIPMode parse_voip_mode(const std::string& s) {
    if (s == "realized") return VoIPMode::Realized;
    if (s == "expected") return VoIPMode::Expected;
    throw std::invalid_argument("config: unknown mode '" + s + "' (expected realized|expected)");
}

/// Loads and validates a run/sweep configuration from a JSON file. Every
/// module invariant (PSD weights, controllability, T >= tau) is checked here
/// so later stages can assume a valid setup.
inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config: parse error in '" + path + "': " + e.what());
    }

    detail::warn_unknown_keys(
        j, {"horizon", "trials", "seed", "subsystems", "policy", "sweep"}, "top level");

    RunConfig cfg;
    if (!j.contains("horizon") || !j["horizon"].is_number_integer())
        throw std::invalid_argument("config: 'horizon' (integer) is required");
    cfg.T = j["horizon"].get<int>();
    if (cfg.T < 0) throw std::invalid_argument("config: 'horizon' must be >= 0");
    cfg.trials = j.value("trials", 1);
    if (cfg.trials < 1) throw std::invalid_argument("config: 'trials' must be >= 1");
    cfg.seed = j.value("seed", std::uint64_t{0});

    if (!j.contains("subsystems") || !j["subsystems"].is_array() || j["subsystems"].empty())
        throw std::invalid_argument("config: 'subsystems' must be a non-empty array");

    int idx = 0;
    for (const auto& js : j["subsystems"]) {
        const std::string where = "subsystems[" + std::to_string(idx) + "]";
        detail::warn_unknown_keys(
            js, {"name", "A", "B", "W", "R0", "tau", "Q", "R", "Q_terminal", "theta"}, where);
        SubsystemConfig sub;
        sub.name = js.value("name", "sys" + std::to_string(idx + 1));
        for (const char* req : {"A", "B", "W", "Q", "R"})
            if (!js.contains(req))
                throw std::invalid_argument("config: " + where + " missing field '" + req + "'");
        sub.model.A = detail::parse_matrix(js["A"], where + ".A");
        sub.model.B = detail::parse_matrix(js["B"], where + ".B");
        sub.model.W = detail::parse_matrix(js["W"], where + ".W");
        // R0 is not stated in the source setup; default to W
        sub.model.R0 = js.contains("R0") ? detail::parse_matrix(js["R0"], where + ".R0") : sub.model.W;
        sub.weights.Q = detail::parse_matrix(js["Q"], where + ".Q");
        sub.weights.R = detail::parse_matrix(js["R"], where + ".R");
        sub.weights.Q_terminal = js.contains("Q_terminal")
                                     ? detail::parse_matrix(js["Q_terminal"], where + ".Q_terminal")
                                     : sub.weights.Q;
        sub.weights.theta = js.value("theta", 0.0);
        sub.tau = js.value("tau", 0);
        try {
            require_valid(sub.model);
            require_valid(sub.weights, sub.model);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config: " + where + ": " + e.what());
        }
        if (sub.tau < 0 || cfg.T < sub.tau)
            throw std::invalid_argument("config: " + where +
                                        ": need horizon >= tau >= 0 (tau=" + std::to_string(sub.tau) +
                                        ", horizon=" + std::to_string(cfg.T) + ")");
        cfg.subsystems.push_back(std::move(sub));
        ++idx;
    }

    if (j.contains("policy")) {
        const auto& jp = j["policy"];
        detail::warn_unknown_keys(jp, {"kind", "mode", "period", "phase", "threshold"}, "policy");
        cfg.policy.kind = parse_policy_kind(jp.value("kind", std::string("voip")));
        cfg.policy.voip_mode = parse_voip_mode(jp.value("mode", std::string("realized")));
        cfg.policy.period = jp.value("period", 1);
        cfg.policy.phase = jp.value("phase", 0);
        cfg.policy.threshold = jp.value("threshold", 0);
        if (cfg.policy.kind != PolicyKind::DPOracle)  // table attached at run time
            cfg.policy.validate();
    }

    if (j.contains("sweep")) {
        const auto& jw = j["sweep"];
        detail::warn_unknown_keys(jw, {"family", "theta_grid", "period_grid", "threshold_grid"},
                                  "sweep");
        SweepSpec sweep;
        sweep.family = jw.value("family", std::string("voip"));
        if (sweep.family != "voip" && sweep.family != "periodic" && sweep.family != "aoi")
            throw std::invalid_argument("config: sweep.family must be voip|periodic|aoi");
        if (jw.contains("theta_grid"))
            sweep.theta_grid = jw["theta_grid"].get<std::vector<double>>();
        if (jw.contains("period_grid"))
            sweep.period_grid = jw["period_grid"].get<std::vector<int>>();
        if (jw.contains("threshold_grid"))
            sweep.threshold_grid = jw["threshold_grid"].get<std::vector<int>>();
        if (sweep.family == "voip" && sweep.theta_grid.empty())
            throw std::invalid_argument("config: voip sweep needs a non-empty theta_grid");
        if (sweep.family == "periodic" && sweep.period_grid.empty())
            throw std::invalid_argument("config: periodic sweep needs a non-empty period_grid");
        if (sweep.family == "aoi" && sweep.threshold_grid.empty())
            throw std::invalid_argument("config: aoi sweep needs a non-empty threshold_grid");
        for (double t : sweep.theta_grid)
            if (t < 0.0) throw std::invalid_argument("config: theta_grid values must be >= 0");
        for (int p : sweep.period_grid)
            if (p < 1) throw std::invalid_argument("config: period_grid values must be >= 1");
        for (int t : sweep.threshold_grid)
            if (t < 0) throw std::invalid_argument("config: threshold_grid values must be >= 0");
        cfg.sweep = std::move(sweep);
    }
    return cfg;
}

}  // namespace ncs
