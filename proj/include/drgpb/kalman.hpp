// Mode-matched Kalman filter step: prediction and correction with one
// mode's system matrices, returning the per-mode estimate, covariance,
// innovation, gain, and observation log-likelihood.
#pragma once

#include <cmath>
#include <string>

#include "drgpb/errors.hpp"
#include "drgpb/linalg.hpp"
#include "drgpb/model.hpp"

namespace drgpb {

struct GaussianBelief {
    Vec mean;
    Mat cov;
};

struct KfOptions {
    /// Covariance update: false = subtract K S K^T from the prediction
    /// (then symmetrize), true = Joseph stabilized form.
    bool joseph_form = false;
    /// Minimum acceptable ratio of smallest to largest eigenvalue of the
    /// innovation covariance; below this the step fails loudly instead of
    /// inverting a numerically singular matrix.
    double conditioning_floor = 1e-12;
};

struct ModeStepOutput {
    GaussianBelief predicted;
    Vec innovation;
    Mat innovation_cov;
    Mat gain;
    GaussianBelief posterior;
    double log_likelihood = 0.0; ///< log N(innovation; 0, innovation_cov)

    double likelihood() const { return std::exp(log_likelihood); }
};

/// Log-density of N(0, cov) at `residual`, via Cholesky (no explicit
/// inverse). Throws NumericalError if cov is not positive definite.
inline double gaussian_logpdf(const Vec& residual, const Mat& cov) {
    if (cov.rows() != residual.size() || cov.cols() != residual.size())
        throw NumericalError("gaussian_logpdf: dimension mismatch");
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NumericalError("gaussian_logpdf: covariance not positive definite");
    const Mat L = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) log_det += 2.0 * std::log(L(i, i));
    const Vec z = L.triangularView<Eigen::Lower>().solve(residual);
    constexpr double log_two_pi = 1.8378770664093453; // log(2*pi)
    return -0.5 * (static_cast<double>(residual.size()) * log_two_pi + log_det +
                   z.squaredNorm());
}

/// One prediction-correction step of the Kalman filter matched to `mode`,
/// seeded from `prior`:
///   x_pred = A x,  P_pred = A P A^T + B W B^T
///   S = C P_pred C^T + D V D^T,  K = P_pred C^T S^{-1}
///   x_post = x_pred + K (y - C x_pred),  P_post = P_pred - K S K^T
/// Fails with NumericalError (naming the mode, 1-based) when S is singular
/// or its eigenvalue ratio falls below the conditioning floor.
inline ModeStepOutput kf_step(const MjlsModel& model, int mode,
                              const GaussianBelief& prior, const Vec& y,
                              const KfOptions& opts = {}) {
    if (mode < 0 || mode >= model.n_theta)
        throw ConfigError("kf_step: mode index out of range");
    const Mat& A = model.A[mode];
    const Mat& B = model.B[mode];
    const Mat& C = model.C[mode];
    const Mat& D = model.D[mode];

    ModeStepOutput out;
    out.predicted.mean = A * prior.mean;
    out.predicted.cov =
        symmetrize(A * prior.cov * A.transpose() + B * model.W * B.transpose());

    out.innovation = y - C * out.predicted.mean;
    const Mat R = D * model.V * D.transpose();
    out.innovation_cov = symmetrize(C * out.predicted.cov * C.transpose() + R);

    Eigen::SelfAdjointEigenSolver<Mat> es(out.innovation_cov,
                                          Eigen::EigenvaluesOnly);
    const double eig_min = es.eigenvalues().minCoeff();
    const double eig_max = es.eigenvalues().maxCoeff();
    if (!(eig_max > 0.0) || !(eig_min > opts.conditioning_floor * eig_max))
        throw NumericalError("mode " + std::to_string(mode + 1) +
                             ": innovation covariance singular or below "
                             "conditioning floor");

    Eigen::LLT<Mat> llt(out.innovation_cov);
    if (llt.info() != Eigen::Success)
        throw NumericalError("mode " + std::to_string(mode + 1) +
                             ": innovation covariance not positive definite");
    out.gain = llt.solve(C * out.predicted.cov).transpose();

    out.posterior.mean = out.predicted.mean + out.gain * out.innovation;
    if (opts.joseph_form) {
        const Mat IKC =
            Mat::Identity(model.n_x, model.n_x) - out.gain * C;
        out.posterior.cov = symmetrize(IKC * out.predicted.cov * IKC.transpose() +
                                       out.gain * R * out.gain.transpose());
    } else {
        out.posterior.cov =
            symmetrize(out.predicted.cov -
                       out.gain * out.innovation_cov * out.gain.transpose());
    }

    out.log_likelihood = gaussian_logpdf(out.innovation, out.innovation_cov);
    return out;
}

} // namespace drgpb
