#pragma once

#include <stdexcept>
#include <vector>

#include "ncs/channel.hpp"
#include "ncs/plant.hpp"

namespace ncs {

/// Controller-side estimate E[x_k | received packets, applied controls].
/// Maintained recursively (propagate between deliveries, rebase on delivery),
/// which reproduces the closed form A^Delta x_{s(k)} + sum A^{r-1} B u_{k-r}
/// exactly.
class ControllerEstimator {
public:
    ControllerEstimator(const PlantModel& model, const Vector& x0)
        : model_(&model), xhat_(x0), base_{0, x0} {}

    /// Advance the estimate by one step with the control applied at the
    /// previous step, and log that control.
    void propagate(const Vector& u_prev) {
        xhat_ = model_->A * xhat_ + model_->B * u_prev;
        control_log_.push_back(u_prev);
    }

    /// Replace the estimate using a freshly delivered packet at time k:
    /// xhat = A^tau x_{k-tau} + sum_{r=1..tau} A^{r-1} B u_{k-r}.
    void rebase(const Packet& pkt, int k) {
        if (pkt.stamp < base_.stamp)
            throw std::logic_error("ControllerEstimator::rebase: stale packet");
        const int delta = k - pkt.stamp;
        if (delta < 0 || k > static_cast<int>(control_log_.size()))
            throw std::logic_error("ControllerEstimator::rebase: control log does not cover packet age");
        Vector acc = pkt.payload;
        // forward recursion over t = stamp..k-1 equals the closed-form sum
        for (int t = pkt.stamp; t < k; ++t)
            acc = model_->A * acc + model_->B * control_log_[static_cast<std::size_t>(t)];
        xhat_ = acc;
        base_ = pkt;
    }

    const Vector& estimate() const { return xhat_; }
    const Packet& base() const { return base_; }

    Vector error(const Vector& x_true) const { return x_true - xhat_; }

private:
    const PlantModel* model_;
    Vector xhat_;
    Packet base_;
    std::vector<Vector> control_log_;  // control_log_[t] = u_t
};

/// Full history visible to the event trigger: states up to k, controls and
/// decisions up to k-1. Noise is reconstructed from consecutive states, so
/// noise_at(t) equals the injected w_t exactly.
class TriggerInfo {
public:
    explicit TriggerInfo(const PlantModel& model) : model_(&model) {}

    void record_state(const Vector& x) { states_.push_back(x); }
    void record_control(const Vector& u) { controls_.push_back(u); }
    void record_decision(bool d) { decisions_.push_back(d ? 1 : 0); }

    const Vector& state_at(int t) const { return states_.at(static_cast<std::size_t>(t)); }
    const Vector& control_at(int t) const { return controls_.at(static_cast<std::size_t>(t)); }
    int decision_at(int t) const { return decisions_.at(static_cast<std::size_t>(t)); }
    int num_states() const { return static_cast<int>(states_.size()); }

    /// w_t = x_{t+1} - A x_t - B u_t; requires x_{t+1} and u_t logged.
    Vector noise_at(int t) const {
        if (t < 0 || t + 1 >= static_cast<int>(states_.size()) ||
            t >= static_cast<int>(controls_.size()))
            throw std::out_of_range("TriggerInfo::noise_at: t outside logged range");
        const auto ut = static_cast<std::size_t>(t);
        return states_[ut + 1] - model_->A * states_[ut] - model_->B * controls_[ut];
    }

private:
    const PlantModel* model_;
    std::vector<Vector> states_;
    std::vector<Vector> controls_;
    std::vector<int> decisions_;
};

}  // namespace ncs
