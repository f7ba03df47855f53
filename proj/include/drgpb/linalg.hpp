// Small dense linear-algebra helpers shared across the library.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "drgpb/errors.hpp"

namespace drgpb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

inline bool is_symmetric(const Mat& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) return false;
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline double min_eigenvalue(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Positive semidefinite within tolerance on the smallest eigenvalue.
inline bool is_psd(const Mat& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) return false;
    return min_eigenvalue(m) >= -tol;
}

/// Symmetric square root of a PSD matrix via eigendecomposition.
/// Eigenvalues in [-tol, 0) are clamped to zero; anything below -tol throws.
inline Mat psd_sqrt(const Mat& m, double tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    if (es.info() != Eigen::Success)
        throw NumericalError("psd_sqrt: eigendecomposition failed");
    Vec lambda = es.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < -tol)
            throw NumericalError("psd_sqrt: matrix is not PSD (eigenvalue " +
                                 std::to_string(lambda(i)) + ")");
        lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
    }
    return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
}

/// Probability-vector check: nonnegative entries summing to one within tol.
inline bool is_distribution(const Vec& p, double tol = 1e-12) {
    if (p.size() == 0) return false;
    if (p.minCoeff() < -tol) return false;
    return std::abs(p.sum() - 1.0) <= tol;
}

} // namespace drgpb
