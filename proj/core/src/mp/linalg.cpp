#include "famp/mp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "famp/error.hpp"

namespace famp::mp {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

bool is_symmetric_psd(const Eigen::MatrixXd& a, double sym_tol,
                      double eig_tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  if (!a.allFinite()) return false;
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(a),
                                                    Eigen::EigenvaluesOnly);
  const double max_eig = es.eigenvalues().maxCoeff();
  const double min_eig = es.eigenvalues().minCoeff();
  return min_eig >= -eig_tol * std::max(max_eig, 0.0);
}

void require_symmetric_psd(const Eigen::MatrixXd& a, const char* what) {
  if (!is_symmetric_psd(a)) {
    throw InvariantError(std::string(what) + " is not symmetric positive semi-definite");
  }
}

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
  const Eigen::Index n = cov.rows();
  if (cov.cwiseAbs().maxCoeff() == 0.0) return Eigen::MatrixXd::Zero(n, n);

  const Eigen::MatrixXd sym = symmetrize(cov);
  const double scale = std::max(sym.diagonal().cwiseAbs().mean(), 1e-300);
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  for (double jitter = 1e-12; jitter <= 1e-6 * 1.0001; jitter *= 10.0) {
    llt.compute(sym + jitter * scale * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw NumericError("covariance factorization failed after jitter up to 1e-6");
}

}  // namespace famp::mp
