#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dodcut/linalg.hpp"
#include "dodcut/mesh.hpp"
#include "dodcut/state.hpp"

namespace dodcut {

enum class EtaMode {
  Inflow,  // inflow magnitude || sum_F |F| Lambda_F^- ||_inf, clamped to [0, 1]
  Manual,  // user constant in [0, 1]
  One,     // cut-cell frozen, its inflow handed straight to its outflow neighbors
  Cfl,     // smallest eta keeping the cut-cell's own update monotone at time step dt
};

struct EtaSettings {
  EtaMode mode = EtaMode::Inflow;
  double value = 1.0;  // used by EtaMode::Manual
  double dt = 0.0;     // used by EtaMode::Cfl
};

EtaMode parse_eta_mode(const std::string& name);
std::string to_string(EtaMode mode);

/// Raised when a wave has no inflow through a stabilized cell but does leave
/// it, so no weights can redistribute its outflow.
class WeightError : public std::runtime_error {
public:
  WeightError(int cell, int wave, const std::string& what)
      : std::runtime_error(what), cell_(cell), wave_(wave) {}
  int cell() const { return cell_; }
  int wave() const { return wave_; }

private:
  int cell_;
  int wave_;
};

struct StabilizedFace {
  int face = 0;
  int neighbor = kBoundary;  // E_i, or kBoundary for a face on the domain boundary
  double length = 0.0;
  Point midpoint = Point::Zero();
  FluxDecomposition outward;  // flux splitting w.r.t. the normal pointing out of the cut-cell
  Matrix omega;               // inflow distribution weight of this face
};

struct StabilizationData {
  int cell = 0;
  double eta = 0.0;
  std::vector<StabilizedFace> faces;  // ordered as in Cell::faces
};

/// Weight of each face of `cell` (ordered as Cell::faces): the face's share of
/// the total inflow, wave by wave, |F_i| C_i^- (sum_k |F_k| C_k^-)^{-1}.
/// A wave without inflow gets zero weight everywhere; throws WeightError if
/// that wave nevertheless has outflow.
std::vector<Matrix> omega_weights(const CutCellMesh& mesh, const SystemMatrices& sys, int cell);

/// Throws std::invalid_argument for a manual value outside [0, 1].
double eta(const CutCellMesh& mesh, const SystemMatrices& sys, int cell, const EtaSettings& settings);

StabilizationData stabilize_cell(const CutCellMesh& mesh, const SystemMatrices& sys, int cell,
                                 const EtaSettings& settings);

/// One entry per cell of mesh.stabilized.
std::vector<StabilizationData> build_stabilization(const CutCellMesh& mesh, const SystemMatrices& sys,
                                                   const EtaSettings& settings);

/// How the penalty of a cut-cell extends its inflow neighbors.
enum class Extension {
  /// The neighbor's own cell value.
  Neighbor,
  /// As Neighbor, except that a neighbor which is itself stabilized
  /// contributes its effective outflow value u + eta sum_i omega_i (v_i - u),
  /// the value its own penalty hands to its outflow neighbors. Identical to
  /// Neighbor when no two stabilized cells share a face.
  Chained,
};

/// Residual of the domain-of-dependence penalty, scaled by inverse cell areas
/// like the upwind residual. For every cut-cell and every face pair (F_j, F_i)
/// it moves eta |F_j| omega_i C_j^+ (u_i - u_cut) out of the outflow neighbor
/// E_j and into the cut-cell. Missing neighbors across the domain boundary are
/// replaced by the boundary data.
class DodStabilization {
public:
  DodStabilization(const CutCellMesh& mesh, const SystemMatrices& sys, std::vector<StabilizationData> data,
                   Extension extension = Extension::Chained);

  const std::vector<StabilizationData>& data() const { return data_; }
  Extension extension() const { return extension_; }

  /// Adds the penalty residual to `residual`.
  void accumulate(const StateVector& u, const BoundaryData& g, double t, StateVector& residual) const;

private:
  struct Coupling {
    int outflow_face;  // index into StabilizationData::faces (j)
    int inflow_face;   // index into StabilizationData::faces (i)
    Matrix weight;     // eta |F_j| omega_i C_j^+
  };
  struct CellTerms {
    int cell;
    double inv_area;
    std::vector<int> neighbor;              // per face
    std::vector<int> neighbor_term;         // per face; index into terms_ or -1
    std::vector<double> neighbor_inv_area;  // 0 for boundary
    std::vector<Point> midpoint;
    std::vector<Vector> mixing;             // per face: eta omega_i in characteristic variables (diagonal)
    std::vector<Coupling> couplings;
  };

  void extension_values(const StateVector& u, const BoundaryData& g, double t,
                        std::vector<std::vector<Vector>>& values) const;

  Matrix eigenbasis_;
  std::vector<StabilizationData> data_;
  Extension extension_;
  std::vector<CellTerms> terms_;
};

StateVector dod_residual(const CutCellMesh& mesh, const SystemMatrices& sys, const StateVector& u,
                         const std::vector<StabilizationData>& stab, const BoundaryData& g, double t,
                         Extension extension = Extension::Chained);

struct WeightDiagnostics {
  int cell = 0;
  double sum_error = 0.0;             // max |sum_i omega_i - P|, P the projector onto waves with inflow
  double redistribution_error = 0.0;  // max over i of |sum_j |F_j| omega_i C_j^+ + |F_i| C_i^-|
  double symmetry_error = 0.0;        // max over (i, j) of |omega_i C_j^+ - (omega_i C_j^+)^T|
  double min_eigenvalue = 0.0;        // min over (i, j) of eig(sym(omega_i C_j^+))
  double eta = 0.0;
  bool passed = false;
};

inline constexpr double kWeightTolerance = 1e-12;

std::vector<WeightDiagnostics> verify_weights(const CutCellMesh& mesh, const SystemMatrices& sys,
                                              const std::vector<StabilizationData>& stab);

/// Ids of cells whose diagnostics fail.
std::vector<int> failing_cells(const std::vector<WeightDiagnostics>& diagnostics);

/// (u, A u) for the homogeneous operator with (u, A v) = a_upw(u, v) + J(u, v).
/// `stab` may be empty (unstabilized operator).
double energy_form(const CutCellMesh& mesh, const SystemMatrices& sys,
                   const std::vector<StabilizationData>& stab, const StateVector& u,
                   Extension extension = Extension::Chained);

/// Minimum of (u, A u) / (u, u) over `trials` random states that vanish in
/// every cell touching the domain boundary. Area-weighted inner products.
double quadratic_form_check(const CutCellMesh& mesh, const SystemMatrices& sys,
                            const std::vector<StabilizationData>& stab, int trials, std::uint64_t seed,
                            Extension extension = Extension::Chained);

}  // namespace dodcut
