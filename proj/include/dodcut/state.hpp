#pragma once

#include <functional>

#include <Eigen/Dense>

#include "dodcut/linalg.hpp"

namespace dodcut {

/// One m-vector per cell, stored contiguously cell after cell.
class StateVector {
public:
  StateVector() = default;
  StateVector(int num_cells, int dim)
      : num_cells_(num_cells), dim_(dim), values_(Eigen::VectorXd::Zero(num_cells * dim)) {}

  int num_cells() const { return num_cells_; }
  int dim() const { return dim_; }

  auto cell(int c) { return values_.segment(c * dim_, dim_); }
  auto cell(int c) const { return values_.segment(c * dim_, dim_); }

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }

  void set_zero() { values_.setZero(); }

private:
  int num_cells_ = 0;
  int dim_ = 0;
  Eigen::VectorXd values_;
};

/// Boundary state g(x, t) evaluated at face midpoints.
using BoundaryData = std::function<Vector(const Point&, double)>;

/// g = 0 in m components.
BoundaryData homogeneous_boundary(int dim);

}  // namespace dodcut
