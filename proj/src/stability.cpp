#include "mactl/stability.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace mactl {

double spectral_radius(const MatrixXd& A) {
  require(A.rows() == A.cols(), "spectral_radius: matrix must be square");
  if (A.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double power_envelope(const MatrixXd& A, double q, int max_power) {
  MatrixXd P = MatrixXd::Identity(A.rows(), A.cols());
  double envelope = 1.0;
  double scale = 1.0;
  for (int n = 1; n <= max_power; ++n) {
    P = A * P;
    scale *= q;
    if (scale == 0.0) break;
    const double norm = P.jacobiSvd().singularValues()(0);
    envelope = std::max(envelope, norm / scale);
  }
  return envelope;
}

StabilityCheck certify_stability(const MatrixXd& A, double margin) {
  require(A.rows() == A.cols(), "certify_stability: A must be square");
  StabilityCheck check;
  check.spectral_radius = spectral_radius(A);
  if (!(check.spectral_radius < 1.0 - margin)) return check;

  const double decay = 0.5 * (1.0 + check.spectral_radius);
  StrongStabilityCert cert;
  cert.spectral_radius = check.spectral_radius;
  cert.gamma = 1.0 - decay;
  cert.kappa = std::sqrt(power_envelope(A, decay));
  check.cert = cert;
  return check;
}

}  // namespace mactl
