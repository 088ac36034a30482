#pragma once

#include <deque>
#include <optional>
#include <stdexcept>

#include "ncs/plant.hpp"

namespace ncs {

/// A stamped state sample in flight on the network.
struct Packet {
    int stamp = 0;
    Vector payload;
};

/// Recursive AoI update: staleness grows by one per step and resets to tau
/// on a delivery.
inline int advance_aoi(int aoi_prev, bool delivered, int tau) {
    return delivered ? tau : aoi_prev + 1;
}

/// Constant tau-step delay channel. A packet submitted at k with a positive
/// decision arrives at k + tau; nothing is lost or reordered. The controller
/// starts out knowing x_0, so the freshest stamp is initialized to 0.
class DelayChannel {
public:
    explicit DelayChannel(int tau) : tau_(tau) {
        if (tau < 0) throw std::invalid_argument("DelayChannel: tau must be >= 0");
    }

    void submit(int k, bool decision, const StateVector& x) {
        if (k <= last_submit_k_)
            throw std::logic_error("DelayChannel::submit: duplicate or out-of-order submission");
        last_submit_k_ = k;
        if (!decision) return;
        if (x.k != k)
            throw std::invalid_argument("DelayChannel::submit: payload stamp must equal k");
        in_flight_.push_back({k + tau_, Packet{k, x.x}});
    }

    /// Delivers the packet due at k, if any, and refreshes the AoI. May be
    /// called again at the same k (the tau = 0 case delivers a packet that
    /// was submitted after the first call); earlier k is a protocol error.
    std::optional<Packet> deliver(int k) {
        if (k < last_deliver_k_)
            throw std::logic_error("DelayChannel::deliver: out-of-order invocation");
        last_deliver_k_ = k;
        std::optional<Packet> out;
        if (!in_flight_.empty() && in_flight_.front().first <= k) {
            out = in_flight_.front().second;
            in_flight_.pop_front();
            last_update_ = k;
            last_stamp_ = out->stamp;
        }
        aoi_ = k - last_stamp_;
        return out;
    }

    int tau() const { return tau_; }
    int aoi() const { return aoi_; }
    int stamp() const { return last_stamp_; }        // s(k)
    int last_update() const { return last_update_; } // c(k)
    std::size_t in_flight() const { return in_flight_.size(); }

private:
    int tau_;
    std::deque<std::pair<int, Packet>> in_flight_;
    int last_update_ = 0;
    int last_stamp_ = 0;
    int aoi_ = 0;
    int last_submit_k_ = -1;
    int last_deliver_k_ = -1;
};

}  // namespace ncs
