#include "dodcut/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dodcut {

SystemMatrices::SystemMatrices(Matrix eigenbasis, Vector speeds_x,
                               Vector speeds_y)
    : eigenbasis_(std::move(eigenbasis)),
      speeds_x_(std::move(speeds_x)),
      speeds_y_(std::move(speeds_y)) {
  const auto m = speeds_x_.size();
  if (m < 1 || m > kMaxStateDim) {
    throw std::invalid_argument("state dimension must lie in [1, " +
                                std::to_string(kMaxStateDim) + "]");
  }
  if (speeds_y_.size() != m || eigenbasis_.rows() != m ||
      eigenbasis_.cols() != m) {
    throw std::invalid_argument("inconsistent system matrix shapes");
  }
  const Matrix gram = eigenbasis_.transpose() * eigenbasis_;
  const double err = (gram - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  if (err > 1e-12) {
    throw std::invalid_argument("eigenbasis is not orthogonal (|O^T O - I| = " +
                                std::to_string(err) + ")");
  }
}

SystemMatrices build_system(double theta, double rho1, double rho2, int m) {
  if (m == 1) {
    Matrix o = Matrix::Identity(1, 1);
    Vector lx(1), ly(1);
    lx << std::cos(rho1);
    ly << std::sin(rho1);
    return SystemMatrices(o, lx, ly);
  }
  if (m == 2) {
    Matrix o(2, 2);
    o << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Vector lx(2), ly(2);
    lx << std::cos(rho1), std::cos(rho2);
    ly << std::sin(rho1), std::sin(rho2);
    return SystemMatrices(o, lx, ly);
  }
  throw std::invalid_argument("build_system: only m = 1 or m = 2 is supported, got " +
                              std::to_string(m));
}

FluxDecomposition flux_matrix(const SystemMatrices& sys, const Point& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("flux_matrix: normal is not a unit vector");
  }
  FluxDecomposition f;
  f.normal = n;
  f.eigenvalues = sys.normal_speeds(n);
  f.positive_eigenvalues = f.eigenvalues.cwiseMax(0.0);
  f.negative_eigenvalues = f.eigenvalues.cwiseMin(0.0);
  f.positive = sys.from_eigen(f.positive_eigenvalues);
  f.negative = sys.from_eigen(f.negative_eigenvalues);
  f.full = f.positive + f.negative;
  f.absolute = f.positive - f.negative;
  return f;
}

double max_wave_speed(const SystemMatrices& sys) {
  double best = 0.0;
  for (int k = 0; k < sys.dim(); ++k) {
    best = std::max(best, std::hypot(sys.speeds_x()(k), sys.speeds_y()(k)));
  }
  return best;
}

}  // namespace dodcut
