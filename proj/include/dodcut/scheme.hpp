#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dodcut/linalg.hpp"
#include "dodcut/mesh.hpp"
#include "dodcut/stabilization.hpp"
#include "dodcut/state.hpp"

namespace dodcut {

/// Plane-wave solution whose characteristic components are
/// w_1 = sin(2 pi (x . d_1 - t)) and w_2 = cos(2 pi (x . d_2 - t)) with
/// d_k = (cos rho_k, sin rho_k); u = O w.
class PlaneWaveSolution {
public:
  PlaneWaveSolution(SystemMatrices sys, double rho1, double rho2);

  Vector operator()(const Point& x, double t) const;
  Vector characteristic(const Point& x, double t) const;

private:
  SystemMatrices sys_;
  double rho1_;
  double rho2_;
};

/// Throws std::invalid_argument for t < 0 or m > 2.
Vector exact_solution(const SystemMatrices& sys, double rho1, double rho2, const Point& x, double t);

/// Cell values sampled at centroids.
StateVector project_initial(const CutCellMesh& mesh, int dim, const std::function<Vector(const Point&)>& field);
StateVector project_initial(const CutCellMesh& mesh, const PlaneWaveSolution& exact, double t = 0.0);

/// First-order upwind operator. Face flux matrices are assembled once;
/// `residual` writes r with u' = u - dt r for explicit Euler.
class UpwindOperator {
public:
  UpwindOperator(const CutCellMesh& mesh, const SystemMatrices& sys);

  void residual(const StateVector& u, const BoundaryData& g, double t, StateVector& r) const;
  /// Sum over exterior faces of |F| (C+ u + C- g): the rate at which the
  /// integral of u leaves the domain.
  Vector boundary_flux(const StateVector& u, const BoundaryData& g, double t) const;

  const CutCellMesh& mesh() const { return *mesh_; }
  const SystemMatrices& system() const { return sys_; }

private:
  struct FaceFlux {
    Matrix plus;   // |F| C+
    Matrix minus;  // |F| C-
  };
  const CutCellMesh* mesh_;
  SystemMatrices sys_;
  std::vector<FaceFlux> face_flux_;
};

StateVector upwind_residual(const CutCellMesh& mesh, const SystemMatrices& sys, const StateVector& u,
                            const BoundaryData& g, double t);

/// u - dt r
StateVector euler_step(const StateVector& u, double dt, const StateVector& residual);

struct ErrorNorms {
  double l1 = 0.0;
  double linf = 0.0;
};

/// Against the exact solution at the cell centroids; L1 is area weighted and
/// sums the components.
ErrorNorms error_norms(const CutCellMesh& mesh, const PlaneWaveSolution& exact, const StateVector& u, double t);

/// sqrt(sum_E |E| |u_E|^2)
double l2_norm(const CutCellMesh& mesh, const StateVector& u);

struct ProblemConfig {
  int n = 20;
  double x0 = 0.2001;
  double gamma_deg = 40.0;
  double theta = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  int m = 2;
  double final_time = 0.5;
  double cfl = 0.4;
  double vf_threshold = 0.4;
  bool stabilize = true;
  EtaSettings eta{EtaMode::Cfl};
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  CutLine cut_line() const;
  SystemMatrices system() const;
};

double time_step_size(const ProblemConfig& cfg);

/// cfg.eta with the time step filled in.
EtaSettings eta_settings(const ProblemConfig& cfg);

struct StepRecord {
  int step = 0;
  double t = 0.0;
  double l2_norm = 0.0;
  double w_min = 0.0;  // over all cells and characteristic components
  double w_max = 0.0;
};

struct RunReport {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  int steps = 0;
  std::size_t num_cells = 0;
  std::size_t num_stabilized = 0;
  double l1 = 0.0;
  double linf = 0.0;
  std::vector<StepRecord> history;  // steps + 1 entries

  // Per characteristic component: bounds of the initial state and of the
  // inflow boundary data, and the extremes reached over the whole run.
  std::vector<double> bound_min;
  std::vector<double> bound_max;
  std::vector<double> observed_min;
  std::vector<double> observed_max;

  StateVector final_state;

  /// Largest excursion of any characteristic component outside its bounds.
  double bound_violation() const;
  /// Largest increase of the L2 norm between consecutive steps.
  double max_l2_increase() const;
};

struct SimulationSetup {
  std::function<Vector(const Point&)> initial;  // sampled at cell centroids
  BoundaryData boundary;
  std::optional<PlaneWaveSolution> exact;  // enables error norms at the final time
};

/// Explicit Euler from t = 0 to cfg.final_time with the last step shortened
/// to land on it. Throws std::runtime_error on a non-finite state.
RunReport simulate(const ProblemConfig& cfg, const CutCellMesh& mesh, const SimulationSetup& setup);

/// Plane-wave problem with exact boundary data.
RunReport run(const ProblemConfig& cfg);

}  // namespace dodcut
