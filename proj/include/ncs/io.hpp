#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncs/scheduler.hpp"
#include "ncs/sim.hpp"

namespace ncs {

/// One point of the rate/performance trade-off.
struct TradeoffRow {
    std::string policy;
    double param = 0.0;
    AggregateMetrics metrics;
    std::uint64_t seed = 0;
    std::string error;  // non-empty when the grid point failed
};

namespace detail {

/// Shortest round-trip decimal formatting; fixed-width, locale-independent.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char cand[40];
        std::snprintf(cand, sizeof cand, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(cand, "%lf", &back);
        if (back == v) return cand;
    }
    return buf;
}

}  // namespace detail

inline void write_tradeoff_csv(const std::vector<TradeoffRow>& rows, std::ostream& os) {
    os << "policy,param,rate_mean,rate_stderr,mse_mean,mse_stderr,"
          "J_mean,J_stderr,psi_mean,psi_stderr,trials,seed,error\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        os << r.policy << ',' << detail::fmt(r.param) << ',' << detail::fmt(m.rate.mean) << ','
           << detail::fmt(m.rate.stderror) << ',' << detail::fmt(m.avg_mse.mean) << ','
           << detail::fmt(m.avg_mse.stderror) << ',' << detail::fmt(m.lqg_cost.mean) << ','
           << detail::fmt(m.lqg_cost.stderror) << ',' << detail::fmt(m.total.mean) << ','
           << detail::fmt(m.total.stderror) << ',' << m.trials << ',' << r.seed << ','
           << r.error << '\n';
    }
}

inline void write_trace_csv(const std::vector<StepRecord>& trace, std::ostream& os) {
    if (trace.empty()) {
        os << "k,delta,delivered,aoi,voip\n";
        return;
    }
    const auto n = trace.front().x.size();
    const auto m = trace.front().u.size();
    os << "k";
    for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
    for (Eigen::Index i = 0; i < n; ++i) os << ",xhat" << i;
    for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i;
    for (Eigen::Index i = 0; i < n; ++i) os << ",e" << i;
    os << ",delta,delivered,aoi,voip\n";
    for (const auto& r : trace) {
        os << r.k;
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << detail::fmt(r.x[i]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << detail::fmt(r.xhat[i]);
        for (Eigen::Index i = 0; i < m; ++i) os << ',' << detail::fmt(r.u[i]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << detail::fmt(r.e[i]);
        os << ',' << r.delta << ',' << r.delivered << ',' << r.aoi << ',';
        if (r.voip) os << detail::fmt(*r.voip);
        os << '\n';
    }
}

inline nlohmann::ordered_json stats_json(const Stats& s) {
    return {{"mean", s.mean}, {"std", s.stddev}, {"stderr", s.stderror}};
}

inline nlohmann::ordered_json aggregate_json(const std::string& policy_desc, double param,
                                             const AggregateMetrics& m, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["policy"] = policy_desc;
    j["param"] = param;
    j["trials"] = m.trials;
    j["seed"] = seed;
    j["metrics"] = {{"rate", stats_json(m.rate)},
                    {"avg_mse", stats_json(m.avg_mse)},
                    {"lqg_cost", stats_json(m.lqg_cost)},
                    {"comm_cost", stats_json(m.comm_cost)},
                    {"psi", stats_json(m.total)}};
    return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ncs
