#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ncs/dp.hpp"
#include "ncs/estimator.hpp"
#include "ncs/lqg.hpp"
#include "ncs/plant.hpp"

namespace ncs {

enum class PolicyKind { VoIProxy, ClassicVoI, AoIThreshold, Periodic, DPOracle };

/// How the noise terms inside the VoI proxy are evaluated: with the realized
/// past noises reconstructed at the trigger, or replaced by their covariance.
enum class VoIPMode { Realized, Expected };

struct SchedulerPolicy {
    PolicyKind kind = PolicyKind::VoIProxy;
    VoIPMode voip_mode = VoIPMode::Realized;
    int threshold = 0;            // AoIThreshold
    int period = 1;               // Periodic, >= 1
    int phase = 0;                // Periodic
    const PolicyTable* table = nullptr;  // DPOracle

    void validate() const {
        if (period < 1) throw std::invalid_argument("SchedulerPolicy: period must be >= 1");
        if (threshold < 0) throw std::invalid_argument("SchedulerPolicy: threshold must be >= 0");
        if (kind == PolicyKind::DPOracle && table == nullptr)
            throw std::invalid_argument("SchedulerPolicy: DPOracle needs a policy table");
    }
};

struct VoIEvaluation {
    double value = 0.0;      // VoIP_k = stage_sum - theta
    double stage_sum = 0.0;  // error-weight reduction from transmitting now
    int aoi_term = 0;        // Delta_{k+tau-1}
    double theta = 0.0;
};

/// Delay-dependent VoI proxy at time k. The stage sum runs over
/// r = tau+1 .. Delta_{k+tau-1}+1; each term is the Gamma_{k+tau}-weighted
/// contribution of the past noise w_{k+tau-r} (realized mode uses the
/// reconstructed sample, expected mode its covariance W). Noise indices
/// before time 0 contribute nothing in realized mode.
inline VoIEvaluation voi_proxy(const GainSchedule& gains, const PlantModel& model, int k,
                               int tau, int aoi_pred, double theta_k,
                               const TriggerInfo& info, VoIPMode mode) {
    if (k + tau > gains.T)
        throw std::out_of_range("voi_proxy: k + tau beyond horizon");
    VoIEvaluation ev;
    ev.aoi_term = aoi_pred;
    ev.theta = theta_k;

    const Matrix& G = gains.Gamma[static_cast<std::size_t>(k + tau)];
    Matrix Ar = Matrix::Identity(model.n(), model.n());  // A^{r-1}
    for (int r = 1; r <= aoi_pred + 1; ++r) {
        if (r >= tau + 1) {
            if (mode == VoIPMode::Expected) {
                ev.stage_sum += (G.cwiseProduct(Ar * model.W * Ar.transpose())).sum();
            } else {
                const int t = k + tau - r;
                if (t >= 0) {
                    const Vector v = Ar * info.noise_at(t);
                    ev.stage_sum += v.dot(G * v);
                }
            }
        }
        Ar = model.A * Ar;
    }
    ev.value = ev.stage_sum - theta_k;
    return ev;
}

/// Delay-free VoI baseline: e_k^T A^T Gamma_{k+1} A e_k - theta_k (the
/// continuation difference is dropped, as in the proxy).
inline double classic_voi(const Vector& e_k, const GainSchedule& gains,
                          const PlantModel& model, int k, double theta_k) {
    if (k + 1 > gains.T)
        throw std::out_of_range("classic_voi: k + 1 beyond horizon");
    const Vector v = model.A * e_k;
    return v.dot(gains.Gamma[static_cast<std::size_t>(k) + 1] * v) - theta_k;
}

/// Per-step inputs a policy may consult.
struct DecideContext {
    int k = 0;
    int tau = 0;
    int T = 0;
    int aoi = 0;       // Delta_k at the controller, after delivery
    int aoi_pred = 0;  // Delta_{k+tau-1}, from the decision history
    double theta_k = 0.0;
    const GainSchedule* gains = nullptr;
    const PlantModel* model = nullptr;
    const TriggerInfo* info = nullptr;
    const Vector* error = nullptr;  // e_k at the trigger
};

struct Decision {
    bool transmit = false;
    std::optional<double> voip;  // filled for VoI-valued policies
};

/// Evaluates one policy at one step. The caller is responsible for forcing
/// no transmission past k = T - tau.
inline Decision decide(const SchedulerPolicy& policy, const DecideContext& ctx) {
    Decision d;
    switch (policy.kind) {
        case PolicyKind::VoIProxy: {
            const VoIEvaluation ev =
                voi_proxy(*ctx.gains, *ctx.model, ctx.k, ctx.tau, ctx.aoi_pred,
                          ctx.theta_k, *ctx.info, policy.voip_mode);
            d.voip = ev.value;
            d.transmit = ev.value > 0.0;
            break;
        }
        case PolicyKind::ClassicVoI: {
            if (ctx.k + 1 > ctx.gains->T) break;
            const double v = classic_voi(*ctx.error, *ctx.gains, *ctx.model, ctx.k, ctx.theta_k);
            d.voip = v;
            d.transmit = v > 0.0;
            break;
        }
        case PolicyKind::AoIThreshold:
            d.transmit = ctx.aoi >= policy.threshold;
            break;
        case PolicyKind::Periodic:
            d.transmit = ((ctx.k - policy.phase) % policy.period + policy.period) %
                             policy.period == 0;
            break;
        case PolicyKind::DPOracle: {
            const int delta = std::clamp(ctx.aoi_pred, 0, policy.table->dmax());
            d.transmit = ctx.aoi_pred >= 0 && policy.table->decision(ctx.k, delta);
            break;
        }
    }
    return d;
}

inline std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::VoIProxy: return "voip";
        case PolicyKind::ClassicVoI: return "classic-voi";
        case PolicyKind::AoIThreshold: return "aoi";
        case PolicyKind::Periodic: return "periodic";
        case PolicyKind::DPOracle: return "dp";
    }
    return "?";
}

}  // namespace ncs
