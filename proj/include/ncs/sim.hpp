#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncs/channel.hpp"
#include "ncs/estimator.hpp"
#include "ncs/lqg.hpp"
#include "ncs/plant.hpp"
#include "ncs/scheduler.hpp"

namespace ncs {

struct TrialConfig {
    PlantModel model;
    CostWeights weights;
    int tau = 0;
    int T = 0;
    SchedulerPolicy policy;
    std::uint64_t seed = 0;
    bool record_trace = false;
    bool debug_checks = false;  // re-assert estimator/AoI identities per step

    void validate() const {
        require_valid(model);
        require_valid(weights, model);
        if (tau < 0 || T < tau) throw std::invalid_argument("TrialConfig: need T >= tau >= 0");
        policy.validate();
    }
};

struct StepRecord {
    int k = 0;
    Vector x, xhat, u, e;
    int delta = 0;
    int delivered = 0;
    int aoi = 0;
    std::optional<double> voip;
};

struct TrialMetrics {
    double rate = 0.0;
    double avg_mse = 0.0;
    double lqg_cost = 0.0;   // J
    double comm_cost = 0.0;  // R
    double total = 0.0;      // Psi = J + R
    double decomposition = 0.0;  // value-function form of Psi from the same trace
    std::vector<StepRecord> trace;
};

namespace detail {

inline void assert_step_identities(const PlantModel& model, const TriggerInfo& info,
                                   const Vector& e, int k, int aoi, int aoi_recursive) {
    if (aoi != aoi_recursive)
        throw std::logic_error("sim: recursive AoI diverged from definitional AoI at k=" +
                               std::to_string(k));
    Vector acc = Vector::Zero(model.n());
    Matrix Ar = Matrix::Identity(model.n(), model.n());
    for (int r = 1; r <= aoi; ++r) {
        acc += Ar * info.noise_at(k - r);
        Ar = model.A * Ar;
    }
    const double denom = std::max(1.0, acc.norm());
    if ((e - acc).norm() > 1e-9 * denom)
        throw std::logic_error("sim: estimation-error identity violated at k=" +
                               std::to_string(k));
}

}  // namespace detail

/// Runs one closed-loop trial. Per-step order: deliver, decide, submit
/// (tau = 0 packets are delivered immediately), control, cost accumulation,
/// then plant step and estimate propagation.
inline TrialMetrics run_trial(const TrialConfig& cfg, const GainSchedule& gains) {
    if (gains.T != cfg.T) throw std::invalid_argument("run_trial: gain schedule horizon mismatch");

    std::mt19937_64 rng(cfg.seed);
    const GaussianSampler init_sampler(cfg.model.R0);
    const GaussianSampler noise_sampler(cfg.model.W);

    StateVector x{init_sampler.sample(rng), 0};
    DelayChannel channel(cfg.tau);
    ControllerEstimator estimator(cfg.model, x.x);
    TriggerInfo info(cfg.model);
    info.record_state(x.x);

    int sched_stamp = -1;  // freshest stamp committed by the scheduler
    int transmissions = 0;
    int aoi_recursive = -1;  // advances to Delta_0 = 0 on the first step
    double stage_cost = 0.0, comm_cost = 0.0, mse = 0.0;
    double decomp = x.x.dot(gains.P[0] * x.x);

    TrialMetrics out;
    if (cfg.record_trace) out.trace.reserve(static_cast<std::size_t>(cfg.T) + 1);

    for (int k = 0; k <= cfg.T; ++k) {
        bool delivered = false;
        if (auto pkt = channel.deliver(k)) {
            estimator.rebase(*pkt, k);
            delivered = true;
        }

        Vector e = estimator.error(x.x);
        Decision dec;
        if (k <= cfg.T - cfg.tau) {
            DecideContext ctx;
            ctx.k = k;
            ctx.tau = cfg.tau;
            ctx.T = cfg.T;
            ctx.aoi = channel.aoi();
            ctx.aoi_pred = k + cfg.tau - 1 - sched_stamp;
            ctx.theta_k = cfg.weights.theta_at(k);
            ctx.gains = &gains;
            ctx.model = &cfg.model;
            ctx.info = &info;
            ctx.error = &e;
            dec = decide(cfg.policy, ctx);
        }
        channel.submit(k, dec.transmit, x);
        info.record_decision(dec.transmit);
        if (dec.transmit) {
            sched_stamp = k;
            ++transmissions;
            if (cfg.tau == 0) {
                if (auto pkt = channel.deliver(k)) {
                    estimator.rebase(*pkt, k);
                    delivered = true;
                }
                e = estimator.error(x.x);
            }
        }
        aoi_recursive = advance_aoi(aoi_recursive, delivered, cfg.tau);
        if (cfg.debug_checks)
            detail::assert_step_identities(cfg.model, info, e, k, channel.aoi(), aoi_recursive);

        const Vector u = certainty_equiv_control(gains, estimator.estimate(), k);
        const double theta_k = cfg.weights.theta_at(k);
        stage_cost += x.x.dot(cfg.weights.Q * x.x) + u.dot(cfg.weights.R * u);
        comm_cost += theta_k * (dec.transmit ? 1.0 : 0.0);
        mse += e.squaredNorm();
        decomp += e.dot(gains.Gamma[static_cast<std::size_t>(k)] * e) +
                  theta_k * (dec.transmit ? 1.0 : 0.0);

        if (cfg.record_trace) {
            StepRecord rec;
            rec.k = k;
            rec.x = x.x;
            rec.xhat = estimator.estimate();
            rec.u = u;
            rec.e = e;
            rec.delta = dec.transmit ? 1 : 0;
            rec.delivered = delivered ? 1 : 0;
            rec.aoi = channel.aoi();
            rec.voip = dec.voip;
            out.trace.push_back(std::move(rec));
        }

        const Vector w = noise_sampler.sample(rng);
        decomp += w.dot(gains.P[static_cast<std::size_t>(k) + 1] * w);
        x = step_plant(cfg.model, x, u, w);
        if (!x.x.allFinite())
            throw std::runtime_error("run_trial: non-finite state at k=" + std::to_string(k + 1) +
                                     " (seed " + std::to_string(cfg.seed) + ")");
        info.record_control(u);
        info.record_state(x.x);
        estimator.propagate(u);
    }

    const double horizon = static_cast<double>(cfg.T) + 1.0;
    out.rate = transmissions / horizon;
    out.avg_mse = mse / horizon;
    out.lqg_cost = (stage_cost + x.x.dot(cfg.weights.Q_terminal * x.x)) / horizon;
    out.comm_cost = comm_cost / horizon;
    out.total = out.lqg_cost + out.comm_cost;
    out.decomposition = decomp / horizon;
    return out;
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
    double stderror = 0.0;
};

struct AggregateMetrics {
    Stats rate, avg_mse, lqg_cost, comm_cost, total, decomposition;
    int trials = 0;
};

namespace detail {

inline Stats summarize(const std::vector<double>& xs) {
    Stats s;
    const double n = static_cast<double>(xs.size());
    for (double v : xs) s.mean += v;
    s.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double v : xs) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / (n - 1.0));
        s.stderror = s.stddev / std::sqrt(n);
    }
    return s;
}

}  // namespace detail

/// Runs `trials` independent trials with seeds base_seed + index. Trial i of
/// two invocations with the same base_seed uses identical noise, so runs that
/// differ only in policy are common-random-number comparable.
inline std::vector<TrialMetrics> run_trials(const TrialConfig& tmpl, const GainSchedule& gains,
                                            int trials, std::uint64_t base_seed) {
    if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    std::vector<TrialMetrics> out;
    out.reserve(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) {
        TrialConfig cfg = tmpl;
        cfg.seed = base_seed + static_cast<std::uint64_t>(i);
        out.push_back(run_trial(cfg, gains));
    }
    return out;
}

inline AggregateMetrics aggregate(const std::vector<TrialMetrics>& ms) {
    auto collect = [&](auto proj) {
        std::vector<double> xs;
        xs.reserve(ms.size());
        for (const auto& m : ms) xs.push_back(proj(m));
        return detail::summarize(xs);
    };
    AggregateMetrics agg;
    agg.trials = static_cast<int>(ms.size());
    agg.rate = collect([](const TrialMetrics& m) { return m.rate; });
    agg.avg_mse = collect([](const TrialMetrics& m) { return m.avg_mse; });
    agg.lqg_cost = collect([](const TrialMetrics& m) { return m.lqg_cost; });
    agg.comm_cost = collect([](const TrialMetrics& m) { return m.comm_cost; });
    agg.total = collect([](const TrialMetrics& m) { return m.total; });
    agg.decomposition = collect([](const TrialMetrics& m) { return m.decomposition; });
    return agg;
}

inline AggregateMetrics run_monte_carlo(const TrialConfig& tmpl, const GainSchedule& gains,
                                        int trials, std::uint64_t base_seed) {
    return aggregate(run_trials(tmpl, gains, trials, base_seed));
}

/// Relative gap between the simulated ensemble-mean Psi and the ensemble mean
/// of its value-function decomposition.
inline double cost_decomposition_gap(const AggregateMetrics& agg) {
    const double denom = std::max(std::abs(agg.total.mean), 1e-300);
    return std::abs(agg.total.mean - agg.decomposition.mean) / denom;
}

}  // namespace ncs
