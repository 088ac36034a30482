#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ncs/plant.hpp"

namespace ncs {

/// Quadratic stage weights and the per-transmission price. Q and R are held
/// constant over the horizon; theta may optionally vary per step.
struct CostWeights {
    Matrix Q;           // n x n, PSD
    Matrix R;           // m x m, PD
    Matrix Q_terminal;  // n x n, PSD, applied at T+1
    double theta = 0.0;
    std::vector<double> theta_schedule;  // overrides theta when non-empty

    double theta_at(int k) const {
        if (!theta_schedule.empty())
            return theta_schedule.at(static_cast<std::size_t>(k));
        return theta;
    }
};

inline void require_valid(const CostWeights& w, const PlantModel& model) {
    if (w.Q.rows() != model.n() || w.Q.cols() != model.n() ||
        w.Q_terminal.rows() != model.n() || w.Q_terminal.cols() != model.n() ||
        w.R.rows() != model.m() || w.R.cols() != model.m())
        throw std::invalid_argument("cost weights: dimension mismatch with model");
    if (!detail::is_symmetric_psd(w.Q) || !detail::is_symmetric_psd(w.Q_terminal))
        throw std::invalid_argument("cost weights: Q and Q_terminal must be symmetric PSD");
    Eigen::SelfAdjointEigenSolver<Matrix> es(w.R);
    if ((w.R - w.R.transpose()).norm() > 1e-10 * std::max(1.0, w.R.norm()) ||
        es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("cost weights: R must be symmetric PD");
    if (w.theta < 0.0)
        throw std::invalid_argument("cost weights: theta must be non-negative");
    for (double t : w.theta_schedule)
        if (t < 0.0) throw std::invalid_argument("cost weights: theta schedule entries must be non-negative");
}

/// Finite-horizon gain schedule. P has entries for k = 0..T+1; L, Lambda and
/// Gamma for k = 0..T, with Gamma_k = L_k^T Lambda_k L_k.
struct GainSchedule {
    std::vector<Matrix> P;
    std::vector<Matrix> L;
    std::vector<Matrix> Lambda;
    std::vector<Matrix> Gamma;
    int T = 0;
};

/// Backward Riccati recursion from P_{T+1} = Q_terminal down to P_0:
///   Lambda_k = R + B^T P_{k+1} B
///   L_k      = -Lambda_k^{-1} B^T P_{k+1} A
///   P_k      = Q + A^T (P_{k+1} - P_{k+1} B Lambda_k^{-1} B^T P_{k+1}) A
/// Lambda_k is inverted through an LLT solve; P is symmetrized each step.
inline GainSchedule backward_riccati(const PlantModel& model, const CostWeights& weights,
                                     int T) {
    if (T < 0) throw std::invalid_argument("backward_riccati: T must be >= 0");
    require_valid(weights, model);

    const Matrix& A = model.A;
    const Matrix& B = model.B;

    GainSchedule s;
    s.T = T;
    s.P.assign(static_cast<std::size_t>(T) + 2, Matrix());
    s.L.assign(static_cast<std::size_t>(T) + 1, Matrix());
    s.Lambda.assign(static_cast<std::size_t>(T) + 1, Matrix());
    s.Gamma.assign(static_cast<std::size_t>(T) + 1, Matrix());

    s.P[static_cast<std::size_t>(T) + 1] = weights.Q_terminal;
    for (int k = T; k >= 0; --k) {
        const Matrix& Pn = s.P[static_cast<std::size_t>(k) + 1];
        Matrix Lambda = weights.R + B.transpose() * Pn * B;
        Lambda = 0.5 * (Lambda + Lambda.transpose());
        Eigen::LLT<Matrix> llt(Lambda);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("backward_riccati: Lambda_k not positive definite");
        Matrix L = -llt.solve(B.transpose() * Pn * A);
        Matrix P = weights.Q + A.transpose() * (Pn - Pn * B * llt.solve(B.transpose() * Pn)) * A;
        P = 0.5 * (P + P.transpose());
        if (!P.allFinite() || !L.allFinite())
            throw std::runtime_error("backward_riccati: non-finite values in recursion");

        const auto uk = static_cast<std::size_t>(k);
        s.Lambda[uk] = Lambda;
        s.L[uk] = L;
        s.Gamma[uk] = L.transpose() * Lambda * L;
        s.P[uk] = P;
    }
    return s;
}

/// u_k = L_k xhat_k.
inline Vector certainty_equiv_control(const GainSchedule& schedule, const Vector& xhat,
                                      int k) {
    if (k < 0 || k > schedule.T)
        throw std::out_of_range("certainty_equiv_control: k outside horizon");
    return schedule.L[static_cast<std::size_t>(k)] * xhat;
}

/// Largest relative residual of the Riccati identity over all k.
inline double riccati_residual(const PlantModel& model, const CostWeights& weights,
                               const GainSchedule& s) {
    double worst = 0.0;
    for (int k = 0; k <= s.T; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const Matrix& Pn = s.P[uk + 1];
        Matrix rhs = weights.Q +
                     model.A.transpose() *
                         (Pn - Pn * model.B * s.Lambda[uk].ldlt().solve(model.B.transpose() * Pn)) *
                         model.A;
        double denom = std::max(1.0, rhs.norm());
        worst = std::max(worst, (s.P[uk] - rhs).norm() / denom);
    }
    return worst;
}

/// Plain-text dump of the schedule for inspection.
inline void dump_schedule(const GainSchedule& s, std::ostream& os) {
    os << "# k  P_k  L_k  Gamma_k\n";
    for (int k = 0; k <= s.T; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        os << "k=" << k << "\nP=\n" << s.P[uk] << "\nL=\n" << s.L[uk]
           << "\nGamma=\n" << s.Gamma[uk] << "\n\n";
    }
    os << "k=" << (s.T + 1) << "\nP=\n" << s.P[static_cast<std::size_t>(s.T) + 1] << "\n";
}

}  // namespace ncs
