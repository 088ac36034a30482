#pragma once

#include <Eigen/Dense>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Discrete-time LTI subsystem x_{k+1} = A x_k + B u_k + w_k with
/// w_k ~ N(0, W) and x_0 ~ N(0, R0).
struct PlantModel {
    Matrix A;   // n x n state transition
    Matrix B;   // n x m input map
    Matrix W;   // n x n process-noise covariance
    Matrix R0;  // n x n initial-state covariance

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
};

/// State sample stamped with its generation time.
struct StateVector {
    Vector x;
    int k = 0;
};

struct ModelReport {
    bool dims_consistent = false;
    bool w_symmetric_psd = false;
    bool r0_symmetric_psd = false;
    int ctrb_rank = 0;
    bool controllable = false;

    bool ok() const {
        return dims_consistent && w_symmetric_psd && r0_symmetric_psd && controllable;
    }
};

namespace detail {

inline bool is_symmetric_psd(const Matrix& M) {
    if (M.rows() != M.cols()) return false;
    const double scale = std::max(1.0, M.norm());
    if ((M - M.transpose()).norm() > 1e-10 * scale) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    return es.eigenvalues().minCoeff() >= -1e-12 * scale;
}

}  // namespace detail

/// Report-only validation: dimensions, PSD covariances, controllability rank.
inline ModelReport check_model(const PlantModel& model) {
    ModelReport rep;
    const int n = model.n();
    const int m = model.m();
    rep.dims_consistent = model.A.rows() == n && model.A.cols() == n &&
                          model.B.rows() == n && model.B.cols() == m &&
                          model.W.rows() == n && model.W.cols() == n &&
                          model.R0.rows() == n && model.R0.cols() == n && n > 0 && m > 0;
    if (!rep.dims_consistent) return rep;
    rep.w_symmetric_psd = detail::is_symmetric_psd(model.W);
    rep.r0_symmetric_psd = detail::is_symmetric_psd(model.R0);

    Matrix ctrb(n, n * m);
    Matrix Ak = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        ctrb.middleCols(i * m, m) = Ak * model.B;
        Ak = model.A * Ak;
    }
    rep.ctrb_rank = static_cast<int>(Eigen::FullPivLU<Matrix>(ctrb).rank());
    rep.controllable = rep.ctrb_rank == n;
    return rep;
}

inline void require_valid(const PlantModel& model) {
    const ModelReport rep = check_model(model);
    if (!rep.ok()) {
        std::ostringstream os;
        os << "invalid plant model:";
        if (!rep.dims_consistent) os << " inconsistent dimensions;";
        if (!rep.w_symmetric_psd) os << " W not symmetric PSD;";
        if (!rep.r0_symmetric_psd) os << " R0 not symmetric PSD;";
        if (!rep.controllable)
            os << " (A,B) not controllable (rank " << rep.ctrb_rank << ");";
        throw std::invalid_argument(os.str());
    }
}

/// One step of the plant recursion. The returned state carries index k+1.
inline StateVector step_plant(const PlantModel& model, const StateVector& x,
                              const Vector& u, const Vector& w) {
    if (x.x.size() != model.n() || u.size() != model.m() || w.size() != model.n())
        throw std::invalid_argument("step_plant: dimension mismatch");
    return {model.A * x.x + model.B * u + w, x.k + 1};
}

/// Zero-mean Gaussian sampler for a fixed PSD covariance. The covariance is
/// factored once through its eigendecomposition, C = U diag(l) U^T, and a
/// sample is U diag(sqrt(max(l,0))) z with z standard normal. Negative
/// eigenvalues within round-off of zero are clamped.
class GaussianSampler {
public:
    explicit GaussianSampler(const Matrix& cov) {
        if (!detail::is_symmetric_psd(cov))
            throw std::invalid_argument("GaussianSampler: covariance not symmetric PSD");
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
        Vector sqrt_ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        factor_ = es.eigenvectors() * sqrt_ev.asDiagonal();
    }

    Vector sample(std::mt19937_64& rng) const {
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector z(factor_.cols());
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
        return factor_ * z;
    }

private:
    Matrix factor_;
};

}  // namespace ncs
