#include "dodcut/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "dodcut/scheme.hpp"

namespace dodcut {

EtaMode parse_eta_mode(const std::string& name) {
  if (name == "inflow") return EtaMode::Inflow;
  if (name == "manual") return EtaMode::Manual;
  if (name == "one") return EtaMode::One;
  if (name == "cfl") return EtaMode::Cfl;
  throw std::invalid_argument("unknown eta_mode '" + name + "' (expected inflow, manual, one or cfl)");
}

std::string to_string(EtaMode mode) {
  switch (mode) {
    case EtaMode::Inflow: return "inflow";
    case EtaMode::Manual: return "manual";
    case EtaMode::One: return "one";
    case EtaMode::Cfl: return "cfl";
  }
  return "unknown";
}

namespace {

struct OutwardFace {
  int face;
  int neighbor;
  double length;
  Point midpoint;
  FluxDecomposition split;
};

std::vector<OutwardFace> outward_faces(const CutCellMesh& mesh, const SystemMatrices& sys, int cell) {
  const auto& c = mesh.cells.at(cell);
  std::vector<OutwardFace> out;
  out.reserve(c.faces.size());
  for (std::size_t k = 0; k < c.faces.size(); ++k) {
    const auto& f = mesh.faces[c.faces[k]];
    const Point n = c.face_signs[k] > 0 ? f.normal : Point(-f.normal);
    out.push_back({f.id, f.neighbor(cell), f.length, f.midpoint(), flux_matrix(sys, n)});
  }
  return out;
}

std::vector<Matrix> weights_for(const std::vector<OutwardFace>& faces, const SystemMatrices& sys, int cell) {
  const int m = sys.dim();
  Vector total_in = Vector::Zero(m);
  Vector total_out = Vector::Zero(m);
  for (const auto& f : faces) {
    total_in += f.length * f.split.negative_eigenvalues;
    total_out += f.length * f.split.positive_eigenvalues;
  }
  for (int k = 0; k < m; ++k) {
    if (total_in(k) == 0.0 && total_out(k) != 0.0) {
      throw WeightError(cell, k,
                        "cell " + std::to_string(cell) + ": wave " + std::to_string(k) +
                            " leaves the cut-cell without any inflow; weights cannot redistribute it");
    }
  }
  std::vector<Matrix> omega;
  omega.reserve(faces.size());
  for (const auto& f : faces) {
    Vector d(m);
    for (int k = 0; k < m; ++k) {
      d(k) = total_in(k) == 0.0 ? 0.0 : f.length * f.split.negative_eigenvalues(k) / total_in(k);
    }
    omega.push_back(sys.from_eigen(d));
  }
  return omega;
}

double eta_for(const std::vector<OutwardFace>& faces, const SystemMatrices& sys, double area,
               const EtaSettings& settings) {
  switch (settings.mode) {
    case EtaMode::One: return 1.0;
    case EtaMode::Manual:
      if (!(settings.value >= 0.0 && settings.value <= 1.0)) {
        throw std::invalid_argument("manual eta must lie in [0, 1]");
      }
      return settings.value;
    case EtaMode::Inflow: {
      Vector inflow = Vector::Zero(sys.dim());
      for (const auto& f : faces) inflow += f.length * f.split.negative_eigenvalues;
      return std::clamp(inflow.cwiseAbs().maxCoeff(), 0.0, 1.0);
    }
    case EtaMode::Cfl: {
      if (!(settings.dt > 0.0)) throw std::invalid_argument("cfl eta needs a positive time step");
      Vector inflow = Vector::Zero(sys.dim());
      for (const auto& f : faces) inflow += f.length * f.split.negative_eigenvalues;
      const double rate = settings.dt * inflow.cwiseAbs().maxCoeff();
      return rate > 0.0 ? std::clamp(1.0 - area / rate, 0.0, 1.0) : 0.0;
    }
  }
  return 0.0;
}

}  // namespace

std::vector<Matrix> omega_weights(const CutCellMesh& mesh, const SystemMatrices& sys, int cell) {
  return weights_for(outward_faces(mesh, sys, cell), sys, cell);
}

double eta(const CutCellMesh& mesh, const SystemMatrices& sys, int cell, const EtaSettings& settings) {
  return eta_for(outward_faces(mesh, sys, cell), sys, mesh.cells.at(cell).area, settings);
}

StabilizationData stabilize_cell(const CutCellMesh& mesh, const SystemMatrices& sys, int cell,
                                 const EtaSettings& settings) {
  const auto faces = outward_faces(mesh, sys, cell);
  const auto omega = weights_for(faces, sys, cell);
  StabilizationData data;
  data.cell = cell;
  data.eta = eta_for(faces, sys, mesh.cells[cell].area, settings);
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    data.faces.push_back({f.face, f.neighbor, f.length, f.midpoint, f.split, omega[k]});
  }
  return data;
}

std::vector<StabilizationData> build_stabilization(const CutCellMesh& mesh, const SystemMatrices& sys,
                                                   const EtaSettings& settings) {
  std::vector<StabilizationData> out;
  out.reserve(mesh.stabilized.size());
  for (int cell : mesh.stabilized) out.push_back(stabilize_cell(mesh, sys, cell, settings));
  return out;
}

DodStabilization::DodStabilization(const CutCellMesh& mesh, const SystemMatrices& sys,
                                   std::vector<StabilizationData> data, Extension extension)
    : eigenbasis_(sys.eigenbasis()), data_(std::move(data)), extension_(extension) {
  std::vector<int> term_of_cell(mesh.cells.size(), -1);
  for (std::size_t k = 0; k < data_.size(); ++k) term_of_cell[data_[k].cell] = static_cast<int>(k);

  terms_.reserve(data_.size());
  for (const auto& d : data_) {
    CellTerms t;
    t.cell = d.cell;
    t.inv_area = 1.0 / mesh.cells[d.cell].area;
    // Same wave-by-wave shares as omega, kept diagonal so that a wave without
    // inflow through a face has an exactly zero coefficient there.
    Vector inflow = Vector::Zero(sys.dim());
    for (const auto& f : d.faces) inflow += f.length * f.outward.negative_eigenvalues;
    for (const auto& f : d.faces) {
      t.neighbor.push_back(f.neighbor);
      t.neighbor_term.push_back(f.neighbor == kBoundary ? -1 : term_of_cell[f.neighbor]);
      t.neighbor_inv_area.push_back(f.neighbor == kBoundary ? 0.0 : 1.0 / mesh.cells[f.neighbor].area);
      t.midpoint.push_back(f.midpoint);
      Vector share(sys.dim());
      for (int k = 0; k < sys.dim(); ++k) {
        share(k) = inflow(k) == 0.0 ? 0.0 : f.length * f.outward.negative_eigenvalues(k) / inflow(k);
      }
      t.mixing.push_back(d.eta * share);
    }
    for (std::size_t j = 0; j < d.faces.size(); ++j) {
      const auto& out = d.faces[j];
      if (out.outward.positive_eigenvalues.isZero(0.0)) continue;
      for (std::size_t i = 0; i < d.faces.size(); ++i) {
        const Matrix& omega = d.faces[i].omega;
        if (omega.isZero(0.0)) continue;
        Matrix w = d.eta * out.length * omega * out.outward.positive;
        if (w.isZero(0.0)) continue;
        t.couplings.push_back({static_cast<int>(j), static_cast<int>(i), std::move(w)});
      }
    }
    terms_.push_back(std::move(t));
  }
}

void DodStabilization::extension_values(const StateVector& u, const BoundaryData& g, double t,
                                        std::vector<std::vector<Vector>>& values) const {
  values.resize(terms_.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    values[k].clear();
    for (std::size_t f = 0; f < term.neighbor.size(); ++f) {
      values[k].push_back(term.neighbor[f] == kBoundary ? g(term.midpoint[f], t) : Vector(u.cell(term.neighbor[f])));
    }
  }
  if (extension_ == Extension::Neighbor) return;

  // Iterate in characteristic variables. Per wave the inflow relation between
  // stabilized cells is acyclic, so the sweep settles exactly after at most
  // (chain length + 1) passes.
  const Matrix ot = eigenbasis_.transpose();
  std::vector<std::vector<Vector>> w(terms_.size());
  std::vector<Vector> own(terms_.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    own[k] = ot * u.cell(terms_[k].cell);
    for (const Vector& v : values[k]) w[k].push_back(ot * v);
  }
  std::vector<Vector> effective(terms_.size());
  for (std::size_t pass = 0; pass <= terms_.size(); ++pass) {
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      Vector mixed = own[k];
      for (std::size_t f = 0; f < terms_[k].mixing.size(); ++f) {
        mixed += terms_[k].mixing[f].cwiseProduct(w[k][f] - own[k]);
      }
      effective[k] = mixed;
    }
    bool changed = false;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const auto& term = terms_[k];
      for (std::size_t f = 0; f < term.neighbor_term.size(); ++f) {
        const int nb = term.neighbor_term[f];
        if (nb < 0 || w[k][f] == effective[nb]) continue;
        w[k][f] = effective[nb];
        changed = true;
      }
    }
    if (!changed) {
      for (std::size_t k = 0; k < terms_.size(); ++k) {
        for (std::size_t f = 0; f < terms_[k].neighbor_term.size(); ++f) {
          // Only the correction is mapped back, so a constant state stays exact.
          const int nb = terms_[k].neighbor_term[f];
          if (nb >= 0) values[k][f] += eigenbasis_ * (w[k][f] - own[nb]);
        }
      }
      return;
    }
  }
  throw std::logic_error("DodStabilization: chained extension values did not settle");
}

void DodStabilization::accumulate(const StateVector& u, const BoundaryData& g, double t,
                                  StateVector& residual) const {
  std::vector<std::vector<Vector>> values;
  extension_values(u, g, t, values);
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    const Vector u_cut = u.cell(term.cell);
    for (const auto& c : term.couplings) {
      const Vector transfer = c.weight * (values[k][c.inflow_face] - u_cut);
      residual.cell(term.cell) += term.inv_area * transfer;
      const int outflow_neighbor = term.neighbor[c.outflow_face];
      if (outflow_neighbor != kBoundary) {
        residual.cell(outflow_neighbor) -= term.neighbor_inv_area[c.outflow_face] * transfer;
      }
    }
  }
}

StateVector dod_residual(const CutCellMesh& mesh, const SystemMatrices& sys, const StateVector& u,
                         const std::vector<StabilizationData>& stab, const BoundaryData& g, double t,
                         Extension extension) {
  StateVector r(u.num_cells(), u.dim());
  DodStabilization(mesh, sys, stab, extension).accumulate(u, g, t, r);
  return r;
}

std::vector<WeightDiagnostics> verify_weights(const CutCellMesh& /*mesh*/, const SystemMatrices& sys,
                                              const std::vector<StabilizationData>& stab) {
  const int m = sys.dim();
  std::vector<WeightDiagnostics> out;
  out.reserve(stab.size());
  for (const auto& d : stab) {
    WeightDiagnostics diag;
    diag.cell = d.cell;
    diag.eta = d.eta;
    diag.min_eigenvalue = std::numeric_limits<double>::infinity();

    // The weights sum to the identity on every wave that enters the cell. A
    // wave without inflow has nothing to distribute and carries zero weight.
    Vector inflow = Vector::Zero(m);
    for (const auto& f : d.faces) inflow += f.length * f.outward.negative_eigenvalues;
    const Matrix active = sys.from_eigen((inflow.array() != 0.0).cast<double>().matrix());
    Matrix sum = Matrix::Zero(m, m);
    for (const auto& f : d.faces) sum += f.omega;
    diag.sum_error = (sum - active).cwiseAbs().maxCoeff();

    for (const auto& fi : d.faces) {
      Matrix redistributed = Matrix::Zero(m, m);
      for (const auto& fj : d.faces) {
        const Matrix product = fi.omega * fj.outward.positive;
        redistributed += fj.length * product;
        diag.symmetry_error = std::max(diag.symmetry_error, (product - product.transpose()).cwiseAbs().maxCoeff());
        const Matrix sym = 0.5 * (product + product.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
        diag.min_eigenvalue = std::min(diag.min_eigenvalue, eig.eigenvalues().minCoeff());
      }
      const Matrix target = -fi.length * fi.outward.negative;
      diag.redistribution_error = std::max(diag.redistribution_error, (redistributed - target).cwiseAbs().maxCoeff());
    }
    diag.passed = diag.sum_error <= kWeightTolerance && diag.redistribution_error <= kWeightTolerance &&
                  diag.symmetry_error <= kWeightTolerance && diag.min_eigenvalue >= -kWeightTolerance;
    out.push_back(diag);
  }
  return out;
}

std::vector<int> failing_cells(const std::vector<WeightDiagnostics>& diagnostics) {
  std::vector<int> bad;
  for (const auto& d : diagnostics) {
    if (!d.passed) bad.push_back(d.cell);
  }
  return bad;
}

double energy_form(const CutCellMesh& mesh, const SystemMatrices& sys,
                   const std::vector<StabilizationData>& stab, const StateVector& u, Extension extension) {
  const auto g = homogeneous_boundary(sys.dim());
  StateVector r(u.num_cells(), u.dim());
  UpwindOperator(mesh, sys).residual(u, g, 0.0, r);
  if (!stab.empty()) DodStabilization(mesh, sys, stab, extension).accumulate(u, g, 0.0, r);
  double sum = 0.0;
  for (const auto& c : mesh.cells) sum += c.area * u.cell(c.id).dot(r.cell(c.id));
  return sum;
}

double quadratic_form_check(const CutCellMesh& mesh, const SystemMatrices& sys,
                            const std::vector<StabilizationData>& stab, int trials, std::uint64_t seed,
                            Extension extension) {
  const int m = sys.dim();
  const auto g = homogeneous_boundary(m);
  const UpwindOperator upwind(mesh, sys);
  std::optional<DodStabilization> dod;
  if (!stab.empty()) dod.emplace(mesh, sys, stab, extension);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  StateVector u(static_cast<int>(mesh.cells.size()), m);
  StateVector r(u.num_cells(), m);
  double best = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    for (const auto& c : mesh.cells) {
      for (int k = 0; k < m; ++k) u.cell(c.id)(k) = c.touches_boundary ? 0.0 : uniform(rng);
    }
    r.set_zero();
    upwind.residual(u, g, 0.0, r);
    if (dod) dod->accumulate(u, g, 0.0, r);
    double num = 0.0, den = 0.0;
    for (const auto& c : mesh.cells) {
      num += c.area * u.cell(c.id).dot(r.cell(c.id));
      den += c.area * u.cell(c.id).squaredNorm();
    }
    if (den > 0.0) best = std::min(best, num / den);
  }
  return std::isinf(best) ? 0.0 : best;
}

}  // namespace dodcut
