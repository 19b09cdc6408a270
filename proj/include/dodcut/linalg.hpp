#pragma once

#include <Eigen/Dense>

namespace dodcut {

// Upper bound on the state dimension m. Storage for m-vectors and m x m
// matrices lives on the stack; the algebra itself is written for any m.
inline constexpr int kMaxStateDim = 4;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxStateDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                             kMaxStateDim, kMaxStateDim>;
using Point = Eigen::Vector2d;

/// Flux Jacobians A = O diag(lx) O^T and B = O diag(ly) O^T of a linear
/// hyperbolic system u_t + A u_x + B u_y = 0 sharing the orthogonal
/// eigenbasis O. Column k of O is the k-th characteristic direction and
/// (lx_k, ly_k) is the velocity of the k-th wave.
class SystemMatrices {
public:
  /// Throws std::invalid_argument if O is not orthogonal to 1e-12 or the
  /// shapes disagree.
  SystemMatrices(Matrix eigenbasis, Vector speeds_x, Vector speeds_y);

  int dim() const { return static_cast<int>(speeds_x_.size()); }
  const Matrix& eigenbasis() const { return eigenbasis_; }
  const Vector& speeds_x() const { return speeds_x_; }
  const Vector& speeds_y() const { return speeds_y_; }

  Matrix a() const { return from_eigen(speeds_x_); }
  Matrix b() const { return from_eigen(speeds_y_); }

  /// Diagonal of n_1 Lambda_1 + n_2 Lambda_2.
  Vector normal_speeds(const Point& n) const {
    return n.x() * speeds_x_ + n.y() * speeds_y_;
  }

  /// O diag(d) O^T
  Matrix from_eigen(const Vector& d) const {
    return eigenbasis_ * d.asDiagonal() * eigenbasis_.transpose();
  }

  Vector to_characteristic(const Vector& u) const {
    return eigenbasis_.transpose() * u;
  }
  Vector from_characteristic(const Vector& w) const { return eigenbasis_ * w; }

private:
  Matrix eigenbasis_;
  Vector speeds_x_;
  Vector speeds_y_;
};

/// Normal flux matrix C = n_1 A + n_2 B on a face with unit normal n and its
/// signed spectral parts.
struct FluxDecomposition {
  Point normal;
  Vector eigenvalues;  // diagonal of Lambda_F
  Vector positive_eigenvalues;
  Vector negative_eigenvalues;
  Matrix full;      // C = C+ + C-
  Matrix positive;  // C+ = O max(0, Lambda_F) O^T
  Matrix negative;  // C- = O min(0, Lambda_F) O^T
  Matrix absolute;  // |C| = C+ - C-
};

/// Two-wave system parametrized by the eigenbasis rotation `theta` and the
/// wave directions `rho1`, `rho2`. For m = 1 this is scalar advection with
/// velocity (cos rho1, sin rho1); theta and rho2 are ignored.
SystemMatrices build_system(double theta, double rho1, double rho2, int m);

/// Throws std::invalid_argument unless |n| = 1 to 1e-12.
FluxDecomposition flux_matrix(const SystemMatrices& sys, const Point& n);

/// max over unit n of || n_1 Lambda_1 + n_2 Lambda_2 ||_inf, attained when n is
/// aligned with the fastest wave's velocity.
double max_wave_speed(const SystemMatrices& sys);

}  // namespace dodcut
