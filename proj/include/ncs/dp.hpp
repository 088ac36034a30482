#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ncs/lqg.hpp"
#include "ncs/plant.hpp"

namespace ncs {

/// Exact finite-horizon triggering policy over the (time, AoI) lattice,
/// solved offline by backward induction in expected mode. The state at
/// decision time k is Delta_{k+tau-1}; skipping moves it to Delta+1,
/// transmitting resets the AoI at k+tau to tau.
class PolicyTable {
public:
    PolicyTable(int T, int tau, int dmax)
        : T_(T), tau_(tau), dmax_(dmax),
          values_(static_cast<std::size_t>(T - tau + 2),
                  std::vector<double>(static_cast<std::size_t>(dmax + 1), 0.0)),
          decisions_(static_cast<std::size_t>(T - tau + 1),
                     std::vector<std::uint8_t>(static_cast<std::size_t>(dmax + 1), 0)) {}

    int T() const { return T_; }
    int tau() const { return tau_; }
    int dmax() const { return dmax_; }

    bool decision(int k, int delta) const {
        check(k, delta, true);
        return decisions_[static_cast<std::size_t>(k)][static_cast<std::size_t>(delta)] != 0;
    }
    /// Cost-to-go V_k(Delta); defined for k = 0..T-tau+1 (zero past the end).
    double value(int k, int delta) const {
        check(k, delta, false);
        return values_[static_cast<std::size_t>(k)][static_cast<std::size_t>(delta)];
    }

    void set(int k, int delta, bool dec, double val) {
        decisions_[static_cast<std::size_t>(k)][static_cast<std::size_t>(delta)] = dec ? 1 : 0;
        values_[static_cast<std::size_t>(k)][static_cast<std::size_t>(delta)] = val;
    }
    void set_value(int k, int delta, double val) {
        values_[static_cast<std::size_t>(k)][static_cast<std::size_t>(delta)] = val;
    }

private:
    void check(int k, int delta, bool decision_table) const {
        const int kmax = T_ - tau_ + (decision_table ? 0 : 1);
        if (k < 0 || k > kmax || delta < 0 || delta > dmax_)
            throw std::out_of_range("PolicyTable: (k, Delta) outside table");
    }

    int T_, tau_, dmax_;
    std::vector<std::vector<double>> values_;
    std::vector<std::vector<std::uint8_t>> decisions_;
};

namespace detail {

/// Cumulative noise-growth matrices C_d = sum_{r=1..d} A^{r-1} W (A^{r-1})^T,
/// so that the expected error weight is E[e^T G e] = tr(G C_Delta).
inline std::vector<Matrix> noise_growth_cumsum(const PlantModel& model, int dmax) {
    std::vector<Matrix> cum(static_cast<std::size_t>(dmax) + 1);
    const int n = model.n();
    cum[0] = Matrix::Zero(n, n);
    Matrix Ak = Matrix::Identity(n, n);  // A^{r-1}
    for (int d = 1; d <= dmax; ++d) {
        cum[static_cast<std::size_t>(d)] =
            cum[static_cast<std::size_t>(d) - 1] + Ak * model.W * Ak.transpose();
        Ak = model.A * Ak;
    }
    return cum;
}

}  // namespace detail

/// Backward induction over k = T-tau..0 and Delta = 0..dmax:
///   V_k(Delta) = min{ c(k, Delta+1) + V_{k+1}(Delta+1),
///                     theta_k + c(k, tau) + V_{k+1}(tau) }
/// with stage cost c(k, d) = tr(Gamma_{k+tau} C_d) and V past T-tau zero.
/// Ties break toward not transmitting.
inline PolicyTable solve_dp(const GainSchedule& gains, const PlantModel& model, int tau,
                            const CostWeights& weights, int T) {
    if (tau < 0 || T < tau) throw std::invalid_argument("solve_dp: need T >= tau >= 0");
    const int dmax = T + tau;
    PolicyTable table(T, tau, dmax);
    const auto cum = detail::noise_growth_cumsum(model, dmax + 1);

    for (int k = T - tau; k >= 0; --k) {
        const Matrix& G = gains.Gamma[static_cast<std::size_t>(k + tau)];
        const double c_tx = (G.cwiseProduct(cum[static_cast<std::size_t>(tau)])).sum();
        for (int d = 0; d <= dmax; ++d) {
            const int d_skip = std::min(d + 1, dmax);
            const double c_skip =
                (G.cwiseProduct(cum[static_cast<std::size_t>(d) + 1])).sum();
            const double v_skip = c_skip + table.value(k + 1, d_skip);
            const double v_tx = weights.theta_at(k) + c_tx + table.value(k + 1, tau);
            const bool tx = v_tx < v_skip;
            table.set(k, d, tx, tx ? v_tx : v_skip);
        }
    }
    return table;
}

/// Exact VoI at (k, Delta): expected stage-cost difference minus the price
/// plus the continuation difference rho_k = V_{k+1}(Delta+1) - V_{k+1}(tau).
/// Positive exactly when the table transmits.
inline double exact_voi(const PolicyTable& table, const GainSchedule& gains,
                        const PlantModel& model, const CostWeights& weights, int k,
                        int delta) {
    const int tau = table.tau();
    const auto cum = detail::noise_growth_cumsum(model, std::max(delta + 1, tau));
    const Matrix& G = gains.Gamma[static_cast<std::size_t>(k + tau)];
    const double stage_diff =
        (G.cwiseProduct(cum[static_cast<std::size_t>(delta) + 1] -
                        cum[static_cast<std::size_t>(tau)]))
            .sum();
    const double rho = table.value(k + 1, std::min(delta + 1, table.dmax())) -
                       table.value(k + 1, tau);
    return stage_diff - weights.theta_at(k) + rho;
}

/// CSV export: k,delta,decision,value.
inline void dump_policy_table(const PolicyTable& table, std::ostream& os) {
    os << "k,delta,decision,value\n";
    for (int k = 0; k <= table.T() - table.tau(); ++k)
        for (int d = 0; d <= table.dmax(); ++d)
            os << k << ',' << d << ',' << (table.decision(k, d) ? 1 : 0) << ','
               << table.value(k, d) << '\n';
}

}  // namespace ncs
