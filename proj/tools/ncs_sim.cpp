// Command-line front end: single runs and trade-off sweeps over transmission
// price, period, or AoI threshold, with CSV/JSON emission.

#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "ncs/ncs.hpp"

namespace {

struct CliOverrides {
    std::string policy;
    std::string mode;
    int trials = -1;
    std::int64_t seed = -1;
    int period = -1;
    int phase = -1;
    int threshold = -1;
    double theta = -1.0;
};

ncs::TrialConfig make_trial_config(const ncs::RunConfig& cfg, const ncs::SubsystemConfig& sub,
                                   const ncs::SchedulerPolicy& policy) {
    ncs::TrialConfig tc;
    tc.model = sub.model;
    tc.weights = sub.weights;
    tc.tau = sub.tau;
    tc.T = cfg.T;
    tc.policy = policy;
    tc.seed = cfg.seed;
    return tc;
}

std::string policy_label(const ncs::SchedulerPolicy& p) {
    std::string s = ncs::to_string(p.kind);
    if (p.kind == ncs::PolicyKind::VoIProxy)
        s += p.voip_mode == ncs::VoIPMode::Realized ? ":realized" : ":expected";
    return s;
}

double policy_param(const ncs::SchedulerPolicy& p, const ncs::CostWeights& w) {
    switch (p.kind) {
        case ncs::PolicyKind::Periodic: return p.period;
        case ncs::PolicyKind::AoIThreshold: return p.threshold;
        default: return w.theta;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-loop networked control simulator with delay-aware scheduling"};

    std::string config_path;
    std::string out_dir = ".";
    bool sweep = false;
    bool trace = false;
    bool dump_gains = false;
    bool dump_dp = false;
    CliOverrides ov;

    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--policy", ov.policy, "Policy: voip|classic-voi|aoi|periodic|dp (overrides config)");
    app.add_option("--mode", ov.mode, "VoI proxy mode: realized|expected (overrides config)");
    app.add_flag("--sweep", sweep, "Run the sweep section of the config");
    app.add_option("--trials", ov.trials, "Monte Carlo trials (overrides config)");
    app.add_option("--seed", ov.seed, "Base seed (overrides config)");
    app.add_option("--out", out_dir, "Output directory (default: .)");
    app.add_flag("--trace", trace, "Write a per-step trace CSV for the first trial");
    app.add_option("--period", ov.period, "Periodic policy period (overrides config)");
    app.add_option("--phase", ov.phase, "Periodic policy phase (overrides config)");
    app.add_option("--threshold", ov.threshold, "AoI threshold (overrides config)");
    app.add_option("--theta", ov.theta, "Per-transmission cost (overrides config)");
    app.add_flag("--dump-gains", dump_gains, "Write the gain schedule per subsystem");
    app.add_flag("--dump-dp", dump_dp, "Write the DP policy table per subsystem (dp policy)");

    CLI11_PARSE(app, argc, argv);

    try {
        ncs::RunConfig cfg = ncs::parse_config(config_path);
        if (!ov.policy.empty()) cfg.policy.kind = ncs::parse_policy_kind(ov.policy);
        if (!ov.mode.empty()) cfg.policy.voip_mode = ncs::parse_voip_mode(ov.mode);
        if (ov.trials >= 1) cfg.trials = ov.trials;
        if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
        if (ov.period >= 1) cfg.policy.period = ov.period;
        if (ov.phase >= 0) cfg.policy.phase = ov.phase;
        if (ov.threshold >= 0) cfg.policy.threshold = ov.threshold;
        if (ov.theta >= 0.0)
            for (auto& sub : cfg.subsystems) sub.weights.theta = ov.theta;

        std::filesystem::create_directories(out_dir);
        const auto out_path = [&](const std::string& f) {
            return (std::filesystem::path(out_dir) / f).string();
        };

        // gains and (when needed) DP tables per subsystem
        std::vector<ncs::GainSchedule> gains;
        std::vector<std::unique_ptr<ncs::PolicyTable>> tables(cfg.subsystems.size());
        for (std::size_t i = 0; i < cfg.subsystems.size(); ++i) {
            const auto& sub = cfg.subsystems[i];
            gains.push_back(ncs::backward_riccati(sub.model, sub.weights, cfg.T));
            if (dump_gains) {
                std::ostringstream os;
                ncs::dump_schedule(gains.back(), os);
                ncs::write_file(out_path("gains_" + sub.name + ".txt"), os.str());
            }
            if (cfg.policy.kind == ncs::PolicyKind::DPOracle && !sweep) {
                tables[i] = std::make_unique<ncs::PolicyTable>(
                    ncs::solve_dp(gains.back(), sub.model, sub.tau, sub.weights, cfg.T));
                if (dump_dp) {
                    std::ostringstream os;
                    ncs::dump_policy_table(*tables[i], os);
                    ncs::write_file(out_path("dp_" + sub.name + ".csv"), os.str());
                }
            }
        }

        if (sweep) {
            if (!cfg.sweep)
                throw std::invalid_argument("--sweep given but the config has no sweep section");
            const auto& spec = *cfg.sweep;
            std::size_t npts = spec.family == "voip"       ? spec.theta_grid.size()
                               : spec.family == "periodic" ? spec.period_grid.size()
                                                           : spec.threshold_grid.size();
            std::vector<ncs::TradeoffRow> rows;
            for (std::size_t p = 0; p < npts; ++p) {
                double psi_sum = 0.0, psi_var_sum = 0.0;
                double param = 0.0;
                bool point_ok = true;
                std::vector<ncs::TradeoffRow> sub_rows;
                for (std::size_t i = 0; i < cfg.subsystems.size(); ++i) {
                    auto sub = cfg.subsystems[i];
                    ncs::SchedulerPolicy pol = cfg.policy;
                    if (spec.family == "voip") {
                        pol.kind = ncs::PolicyKind::VoIProxy;
                        sub.weights.theta = spec.theta_grid[p];
                        param = spec.theta_grid[p];
                    } else if (spec.family == "periodic") {
                        pol.kind = ncs::PolicyKind::Periodic;
                        pol.period = spec.period_grid[p];
                        param = pol.period;
                    } else {
                        pol.kind = ncs::PolicyKind::AoIThreshold;
                        pol.threshold = spec.threshold_grid[p];
                        param = pol.threshold;
                    }
                    ncs::TradeoffRow row;
                    row.policy = sub.name + ":" + policy_label(pol);
                    row.param = param;
                    row.seed = cfg.seed;
                    try {
                        const auto tc = make_trial_config(cfg, sub, pol);
                        row.metrics = ncs::run_monte_carlo(tc, gains[i], cfg.trials, cfg.seed);
                        psi_sum += row.metrics.total.mean;
                        psi_var_sum += row.metrics.total.stderror * row.metrics.total.stderror;
                    } catch (const std::exception& e) {
                        row.error = e.what();
                        point_ok = false;
                    }
                    sub_rows.push_back(std::move(row));
                }
                for (auto& r : sub_rows) rows.push_back(std::move(r));
                if (cfg.subsystems.size() > 1) {
                    ncs::TradeoffRow sum_row;
                    sum_row.policy = "sum:" + spec.family;
                    sum_row.param = param;
                    sum_row.seed = cfg.seed;
                    sum_row.metrics.trials = cfg.trials;
                    sum_row.metrics.total.mean = psi_sum;
                    sum_row.metrics.total.stderror = std::sqrt(psi_var_sum);
                    if (!point_ok) sum_row.error = "subsystem failure";
                    rows.push_back(std::move(sum_row));
                }
            }
            std::ostringstream os;
            ncs::write_tradeoff_csv(rows, os);
            ncs::write_file(out_path("tradeoff.csv"), os.str());
            std::cout << "wrote " << out_path("tradeoff.csv") << " (" << rows.size() << " rows)\n";
            return 0;
        }

        // single run
        nlohmann::ordered_json all = nlohmann::ordered_json::array();
        double psi_sum = 0.0;
        for (std::size_t i = 0; i < cfg.subsystems.size(); ++i) {
            const auto& sub = cfg.subsystems[i];
            ncs::SchedulerPolicy pol = cfg.policy;
            if (pol.kind == ncs::PolicyKind::DPOracle) pol.table = tables[i].get();
            auto tc = make_trial_config(cfg, sub, pol);
            const auto agg = ncs::run_monte_carlo(tc, gains[i], cfg.trials, cfg.seed);
            psi_sum += agg.total.mean;
            auto j = ncs::aggregate_json(sub.name + ":" + policy_label(pol),
                                         policy_param(pol, sub.weights), agg, cfg.seed);
            all.push_back(j);
            std::cout << sub.name << ": rate=" << agg.rate.mean << " mse=" << agg.avg_mse.mean
                      << " J=" << agg.lqg_cost.mean << " psi=" << agg.total.mean << "\n";
            if (trace) {
                tc.record_trace = true;
                const auto tm = ncs::run_trial(tc, gains[i]);
                std::ostringstream os;
                ncs::write_trace_csv(tm.trace, os);
                ncs::write_file(out_path("trace_" + sub.name + ".csv"), os.str());
            }
        }
        nlohmann::ordered_json top;
        top["subsystems"] = all;
        top["psi_sum"] = psi_sum;
        ncs::write_file(out_path("aggregate.json"), top.dump(2) + "\n");
        std::cout << "wrote " << out_path("aggregate.json") << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
