#pragma once

#include <Eigen/Core>

namespace famp::mp {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

/// Symmetric within 1e-10 (relative to the largest entry) and minimum
/// eigenvalue >= -1e-9 * max eigenvalue.
bool is_symmetric_psd(const Eigen::MatrixXd& a, double sym_tol = 1e-10,
                      double eig_tol = 1e-9);

/// Throws InvariantError naming `what` when `a` is not symmetric PSD.
void require_symmetric_psd(const Eigen::MatrixXd& a, const char* what);

/// Lower-triangular L with L L^T ~= cov. Tries a plain Cholesky, then adds
/// jitter 1e-12 .. 1e-6 (scaled by the mean diagonal). An all-zero matrix
/// yields a zero factor. Throws NumericError when every attempt fails.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov);

}  // namespace famp::mp
