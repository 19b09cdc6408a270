#include "dodcut/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dodcut {

BoundaryData homogeneous_boundary(int dim) {
  return [dim](const Point&, double) -> Vector { return Vector::Zero(dim); };
}

PlaneWaveSolution::PlaneWaveSolution(SystemMatrices sys, double rho1, double rho2)
    : sys_(std::move(sys)), rho1_(rho1), rho2_(rho2) {
  if (sys_.dim() > 2) {
    throw std::invalid_argument("PlaneWaveSolution: defined for m <= 2 only");
  }
}

Vector PlaneWaveSolution::characteristic(const Point& x, double t) const {
  if (t < 0.0) throw std::invalid_argument("exact solution requested at negative time");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Vector w(sys_.dim());
  w(0) = std::sin(two_pi * (x.x() * std::cos(rho1_) + x.y() * std::sin(rho1_) - t));
  if (sys_.dim() == 2) {
    w(1) = std::cos(two_pi * (x.x() * std::cos(rho2_) + x.y() * std::sin(rho2_) - t));
  }
  return w;
}

Vector PlaneWaveSolution::operator()(const Point& x, double t) const {
  return sys_.from_characteristic(characteristic(x, t));
}

Vector exact_solution(const SystemMatrices& sys, double rho1, double rho2, const Point& x, double t) {
  return PlaneWaveSolution(sys, rho1, rho2)(x, t);
}

StateVector project_initial(const CutCellMesh& mesh, int dim,
                            const std::function<Vector(const Point&)>& field) {
  StateVector u(static_cast<int>(mesh.cells.size()), dim);
  for (const auto& c : mesh.cells) u.cell(c.id) = field(c.centroid);
  return u;
}

StateVector project_initial(const CutCellMesh& mesh, const PlaneWaveSolution& exact, double t) {
  const int dim = static_cast<int>(exact(Point::Zero(), t).size());
  return project_initial(mesh, dim, [&](const Point& x) { return exact(x, t); });
}

UpwindOperator::UpwindOperator(const CutCellMesh& mesh, const SystemMatrices& sys)
    : mesh_(&mesh), sys_(sys) {
  face_flux_.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    const auto split = flux_matrix(sys, f.normal);
    face_flux_.push_back({f.length * split.positive, f.length * split.negative});
  }
}

void UpwindOperator::residual(const StateVector& u, const BoundaryData& g, double t, StateVector& r) const {
  // The flux out of E through F, |F| (C+ u_E + C- u_N), is split into
  // |F| C u_E + |F| C- (u_N - u_E). The first part sums to zero over a closed
  // cell, so it is left out: in floating point its rounding error would be
  // divided by the area of a sliver cell, and a constant state would not
  // stay constant.
  const auto& faces = mesh_->faces;
  std::vector<Vector> jump(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    const Vector outer = f.outer == kBoundary ? g(f.midpoint(), t) : Vector(u.cell(f.outer));
    jump[k] = outer - u.cell(f.inner);
  }
  for (const auto& c : mesh_->cells) {
    Vector acc = Vector::Zero(u.dim());
    for (std::size_t k = 0; k < c.faces.size(); ++k) {
      const int f = c.faces[k];
      if (c.face_signs[k] > 0) {
        acc += face_flux_[f].minus * jump[f];
      } else {
        acc += face_flux_[f].plus * jump[f];
      }
    }
    r.cell(c.id) += acc / c.area;
  }
}

Vector UpwindOperator::boundary_flux(const StateVector& u, const BoundaryData& g, double t) const {
  Vector total = Vector::Zero(u.dim());
  for (std::size_t k = 0; k < mesh_->faces.size(); ++k) {
    const auto& f = mesh_->faces[k];
    if (f.outer != kBoundary) continue;
    total += face_flux_[k].plus * u.cell(f.inner) + face_flux_[k].minus * g(f.midpoint(), t);
  }
  return total;
}

StateVector upwind_residual(const CutCellMesh& mesh, const SystemMatrices& sys, const StateVector& u,
                            const BoundaryData& g, double t) {
  StateVector r(u.num_cells(), u.dim());
  UpwindOperator(mesh, sys).residual(u, g, t, r);
  return r;
}

StateVector euler_step(const StateVector& u, double dt, const StateVector& residual) {
  StateVector next = u;
  next.values() -= dt * residual.values();
  return next;
}

ErrorNorms error_norms(const CutCellMesh& mesh, const PlaneWaveSolution& exact, const StateVector& u, double t) {
  ErrorNorms e;
  for (const auto& c : mesh.cells) {
    const Vector diff = (u.cell(c.id) - exact(c.centroid, t)).cwiseAbs();
    e.l1 += c.area * diff.sum();
    e.linf = std::max(e.linf, diff.maxCoeff());
  }
  return e;
}

double l2_norm(const CutCellMesh& mesh, const StateVector& u) {
  double sum = 0.0;
  for (const auto& c : mesh.cells) sum += c.area * u.cell(c.id).squaredNorm();
  return std::sqrt(sum);
}

void ProblemConfig::validate() const {
  if (n < 2) throw std::invalid_argument("N must be at least 2");
  if (m != 1 && m != 2) throw std::invalid_argument("m must be 1 or 2");
  if (!(final_time > 0.0)) throw std::invalid_argument("T must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
  if (!(vf_threshold > 0.0)) throw std::invalid_argument("vf_threshold must be positive");
  if (eta.mode == EtaMode::Manual && !(eta.value >= 0.0 && eta.value <= 1.0)) {
    throw std::invalid_argument("eta_value must lie in [0, 1]");
  }
}

CutLine ProblemConfig::cut_line() const { return {x0, gamma_deg * std::numbers::pi / 180.0}; }

SystemMatrices ProblemConfig::system() const { return build_system(theta, rho1, rho2, m); }

double time_step_size(const ProblemConfig& cfg) {
  cfg.validate();
  const double h = 1.0 / cfg.n;
  return cfg.cfl * h / max_wave_speed(cfg.system());
}

EtaSettings eta_settings(const ProblemConfig& cfg) {
  EtaSettings eta = cfg.eta;
  eta.dt = time_step_size(cfg);
  return eta;
}

double RunReport::bound_violation() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < bound_min.size(); ++k) {
    worst = std::max({worst, observed_max[k] - bound_max[k], bound_min[k] - observed_min[k]});
  }
  return worst;
}

double RunReport::max_l2_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < history.size(); ++k) {
    worst = std::max(worst, history[k].l2_norm - history[k - 1].l2_norm);
  }
  return worst;
}

RunReport simulate(const ProblemConfig& cfg, const CutCellMesh& mesh, const SimulationSetup& setup) {
  cfg.validate();
  const SystemMatrices sys = cfg.system();
  const int m = sys.dim();

  const UpwindOperator upwind(mesh, sys);
  std::optional<DodStabilization> dod;
  if (cfg.stabilize) {
    auto data = build_stabilization(mesh, sys, eta_settings(cfg));
    const auto bad = failing_cells(verify_weights(mesh, sys, data));
    if (!bad.empty()) {
      throw std::runtime_error("stabilization weights violate their conditions in " +
                               std::to_string(bad.size()) + " cells (first: " + std::to_string(bad.front()) +
                               ")");
    }
    dod.emplace(mesh, sys, std::move(data));
  }

  RunReport report;
  report.n = mesh.n;
  report.h = mesh.h;
  report.dt = time_step_size(cfg);
  report.num_cells = mesh.cells.size();
  report.num_stabilized = mesh.stabilized.size();
  report.steps = std::max(1, static_cast<int>(std::ceil(cfg.final_time / report.dt - 1e-9)));

  // Exterior faces on which at least one wave enters.
  struct InflowFace {
    Point midpoint;
    Vector eigenvalues;
  };
  std::vector<InflowFace> inflow;
  for (const auto& f : mesh.faces) {
    if (f.outer != kBoundary) continue;
    const Vector lambda = sys.normal_speeds(f.normal);
    if (lambda.minCoeff() < 0.0) inflow.push_back({f.midpoint(), lambda});
  }

  StateVector u = project_initial(mesh, m, setup.initial);
  StateVector r(u.num_cells(), m);

  report.bound_min.assign(m, std::numeric_limits<double>::infinity());
  report.bound_max.assign(m, -std::numeric_limits<double>::infinity());
  report.observed_min = report.bound_min;
  report.observed_max = report.bound_max;

  auto record = [&](int step, double t) {
    StepRecord rec;
    rec.step = step;
    rec.t = t;
    rec.l2_norm = l2_norm(mesh, u);
    rec.w_min = std::numeric_limits<double>::infinity();
    rec.w_max = -std::numeric_limits<double>::infinity();
    for (const auto& c : mesh.cells) {
      const Vector w = sys.to_characteristic(u.cell(c.id));
      for (int k = 0; k < m; ++k) {
        report.observed_min[k] = std::min(report.observed_min[k], w(k));
        report.observed_max[k] = std::max(report.observed_max[k], w(k));
        rec.w_min = std::min(rec.w_min, w(k));
        rec.w_max = std::max(rec.w_max, w(k));
      }
    }
    report.history.push_back(rec);
  };
  auto widen_by_inflow = [&](double t) {
    for (const auto& f : inflow) {
      const Vector w = sys.to_characteristic(setup.boundary(f.midpoint, t));
      for (int k = 0; k < m; ++k) {
        if (f.eigenvalues(k) < 0.0) {
          report.bound_min[k] = std::min(report.bound_min[k], w(k));
          report.bound_max[k] = std::max(report.bound_max[k], w(k));
        }
      }
    }
  };

  record(0, 0.0);
  report.bound_min = report.observed_min;
  report.bound_max = report.observed_max;

  for (int step = 0; step < report.steps; ++step) {
    const double t = step * report.dt;
    const double dt = step + 1 == report.steps ? cfg.final_time - t : report.dt;
    widen_by_inflow(t);
    r.set_zero();
    upwind.residual(u, setup.boundary, t, r);
    if (dod) dod->accumulate(u, setup.boundary, t, r);
    u.values() -= dt * r.values();
    if (!u.values().allFinite()) {
      throw std::runtime_error("non-finite state after step " + std::to_string(step + 1));
    }
    record(step + 1, step + 1 == report.steps ? cfg.final_time : t + dt);
  }

  if (setup.exact) {
    const auto e = error_norms(mesh, *setup.exact, u, cfg.final_time);
    report.l1 = e.l1;
    report.linf = e.linf;
  }
  report.final_state = std::move(u);
  return report;
}

RunReport run(const ProblemConfig& cfg) {
  cfg.validate();
  const auto mesh = generate_mesh(cfg.n, cfg.cut_line(), cfg.vf_threshold);
  const PlaneWaveSolution exact(cfg.system(), cfg.rho1, cfg.rho2);
  SimulationSetup setup;
  setup.initial = [&](const Point& x) { return exact(x, 0.0); };
  setup.boundary = [&](const Point& x, double t) { return exact(x, t); };
  setup.exact = exact;
  return simulate(cfg, mesh, setup);
}

}  // namespace dodcut
