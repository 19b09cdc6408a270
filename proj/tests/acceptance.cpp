// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dodcut/harness.hpp"

using namespace dodcut;

namespace {

constexpr double kPi = std::numbers::pi;

constexpr double kWeightTol = 1e-12;
constexpr double kRayleighTol = -1e-10;
constexpr double kOrderL1Min = 0.8;
constexpr double kOrderL1Max = 1.2;
constexpr double kOrderLinfMin = 0.7;
constexpr double kOvershootTol = 1e-10;
constexpr double kFreeStreamTol = 1e-12;
constexpr double kOracleTol = 1e-13;

int failures = 0;

void report(int id, const char* name, bool passed, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", passed ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!passed) ++failures;
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

ProblemConfig figure_config(bool right) {
  ProblemConfig cfg;
  cfg.x0 = 0.2001;
  cfg.gamma_deg = right ? 30.0 : 40.0;
  cfg.theta = 4.0 * kPi / 3.0;
  cfg.rho1 = 7.0 * kPi / 4.0;
  cfg.rho2 = right ? 1.5 * kPi : kPi;
  cfg.final_time = 0.5;
  cfg.cfl = 0.4;
  return cfg;
}

ProblemConfig random_config(std::mt19937_64& rng, int n_min, int n_max) {
  std::uniform_int_distribution<int> resolution(n_min, n_max);
  std::uniform_real_distribution<double> gamma(5.0, 85.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  ProblemConfig cfg;
  cfg.n = resolution(rng);
  cfg.gamma_deg = gamma(rng);
  cfg.theta = angle(rng);
  cfg.rho1 = angle(rng);
  cfg.rho2 = angle(rng);
  return cfg;
}

void weight_conditions() {
  std::mt19937_64 rng(20240601);
  int configs = 0;
  std::size_t cells = 0;
  double sum_err = 0.0, redistribution_err = 0.0, sym = 0.0, min_eig = 0.0;
  std::vector<int> bad;
  while (configs < 120) {
    const ProblemConfig cfg = random_config(rng, 8, 64);
    const auto mesh = generate_mesh(cfg.n, cfg.cut_line(), cfg.vf_threshold);
    if (mesh.stabilized.empty()) continue;
    const SystemMatrices sys = cfg.system();
    const auto diagnostics = verify_weights(mesh, sys, build_stabilization(mesh, sys, eta_settings(cfg)));
    for (const auto& d : diagnostics) {
      sum_err = std::max(sum_err, d.sum_error);
      redistribution_err = std::max(redistribution_err, d.redistribution_error);
      sym = std::max(sym, d.symmetry_error);
      min_eig = std::min(min_eig, d.min_eigenvalue);
    }
    if (!failing_cells(diagnostics).empty()) bad.push_back(configs);
    cells += diagnostics.size();
    ++configs;
  }
  const bool passed = bad.empty() && sum_err <= kWeightTol && redistribution_err <= kWeightTol && sym <= kWeightTol &&
                      min_eig >= -kWeightTol;
  report(1, "weight conditions", passed,
         format("%d configs, %zu cut-cells; max sum error %.1e, max redistribution error %.1e, "
                "max asymmetry %.1e, min eigenvalue %.1e (tol %.0e)",
                configs, cells, sum_err, redistribution_err, sym, min_eig, kWeightTol));
}

void quadratic_form() {
  std::vector<ProblemConfig> configs;
  for (bool right : {false, true}) {
    for (int n : {8, 16, 32}) {
      ProblemConfig cfg = figure_config(right);
      cfg.n = n;
      configs.push_back(cfg);
    }
  }
  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) configs.push_back(random_config(rng, 8, 32));

  double stabilized = INFINITY;
  double unstabilized = INFINITY;
  bool weights_ok = true;
  for (const ProblemConfig& cfg : configs) {
    const CheckReport r = check(cfg, 1000);
    stabilized = std::min(stabilized, r.min_rayleigh_stabilized);
    unstabilized = std::min(unstabilized, r.min_rayleigh_unstabilized);
    weights_ok = weights_ok && failing_cells(r.weights).empty();
  }
  const bool passed = weights_ok && stabilized >= kRayleighTol && unstabilized >= kRayleighTol;
  report(2, "energy form", passed,
         format("%zu meshes (N <= 32), 1000 trials each; min Rayleigh quotient %.4g stabilized, "
                "%.4g unstabilized (tol %.0e)",
                configs.size(), stabilized, unstabilized, kRayleighTol));
}

struct FigureRuns {
  std::vector<RunReport> reports;
  std::optional<std::string> error;
};

FigureRuns figure_runs(bool right) {
  FigureRuns out;
  for (int n : {20, 40, 80, 160}) {
    ProblemConfig cfg = figure_config(right);
    cfg.n = n;
    try {
      out.reports.push_back(run(cfg));
    } catch (const std::exception& e) {
      out.error = "N = " + std::to_string(n) + ": " + e.what();
      break;
    }
  }
  return out;
}

void convergence(const FigureRuns& left, const FigureRuns& right) {
  bool passed = true;
  std::string detail;
  for (const auto& [name, runs] : {std::pair("left", &left), std::pair("right", &right)}) {
    if (runs->error) {
      passed = false;
      detail += std::string(name) + " failed at " + *runs->error + "; ";
      continue;
    }
    const auto& r = runs->reports;
    bool monotone = true;
    for (std::size_t k = 1; k < r.size(); ++k) monotone = monotone && r[k].l1 < r[k - 1].l1 && r[k].linf < r[k - 1].linf;
    const auto& a = r[r.size() - 2];
    const auto& b = r.back();
    const double p1 = observed_order(a.l1, b.l1, a.h, b.h);
    const double pinf = observed_order(a.linf, b.linf, a.h, b.h);
    const bool ok = monotone && p1 >= kOrderL1Min && p1 <= kOrderL1Max && pinf >= kOrderLinfMin;
    passed = passed && ok;
    detail += format("%s L1 %.3e->%.3e order %.3f, Linf %.3e->%.3e order %.3f, %s; ", name, r.front().l1, b.l1, p1,
                     r.front().linf, b.linf, pinf, monotone ? "monotone" : "NOT monotone");
  }
  detail += format("need L1 order in [%.1f, %.1f], Linf order >= %.1f", kOrderL1Min, kOrderL1Max, kOrderLinfMin);
  report(3, "convergence", passed, detail);
}

void overshoot(const FigureRuns& left, const FigureRuns& right) {
  bool passed = true;
  double worst = 0.0;
  std::size_t runs = 0;
  for (const FigureRuns* f : {&left, &right}) {
    if (f->error) passed = false;
    for (const auto& r : f->reports) {
      worst = std::max(worst, r.bound_violation());
      ++runs;
    }
  }
  passed = passed && worst <= kOvershootTol;
  report(4, "overshoot bound", passed,
         format("%zu runs (N = 20..160), largest excursion of a characteristic component %.2e (tol %.0e)", runs,
                worst, kOvershootTol));
}

struct SmallCellOutcome {
  double overshoot = 0.0;
  double decay_increase = 0.0;
  bool blew_up = false;
};

SmallCellOutcome small_cell_run(bool stabilize) {
  ProblemConfig cfg = figure_config(false);
  cfg.n = 40;
  cfg.stabilize = stabilize;
  SmallCellOutcome out;
  try {
    out.overshoot = run(cfg).bound_violation();
    out.decay_increase = l2_decay_experiment(cfg).max_increase;
  } catch (const std::runtime_error&) {
    out.blew_up = true;
  }
  return out;
}

void small_cell_problem() {
  const SmallCellOutcome off = small_cell_run(false);
  const SmallCellOutcome on = small_cell_run(true);
  const bool off_violates = off.blew_up || off.overshoot > kOvershootTol || off.decay_increase > kDecayTolerance;
  const bool on_passes = !on.blew_up && on.overshoot <= kOvershootTol && on.decay_increase <= kDecayTolerance;
  report(5, "small-cell problem", off_violates && on_passes,
         format("N = 40, gamma = 40 deg: unstabilized %sovershoot %.2e, L2 increase %.2e; "
                "stabilized overshoot %.2e, L2 increase %.2e",
                off.blew_up ? "diverged, " : "", off.overshoot, off.decay_increase, on.overshoot, on.decay_increase));
}

void free_stream() {
  double worst = 0.0;
  for (bool right : {false, true}) {
    ProblemConfig cfg = figure_config(right);
    cfg.n = 40;
    const auto mesh = generate_mesh(cfg.n, cfg.cut_line(), cfg.vf_threshold);
    const SystemMatrices sys = cfg.system();
    const UpwindOperator upwind(mesh, sys);
    const DodStabilization penalty(mesh, sys, build_stabilization(mesh, sys, eta_settings(cfg)));
    const Vector c = (Vector(2) << 0.8, -0.35).finished();
    const BoundaryData g = [&](const Point&, double) { return c; };
    const double dt = time_step_size(cfg);
    StateVector u = project_initial(mesh, 2, [&](const Point&) { return c; });
    for (int step = 0; step < 100; ++step) {
      StateVector r(u.num_cells(), 2);
      upwind.residual(u, g, step * dt, r);
      penalty.accumulate(u, g, step * dt, r);
      const StateVector next = euler_step(u, dt, r);
      worst = std::max(worst, (next.values() - u.values()).cwiseAbs().maxCoeff());
      u = next;
    }
  }
  report(6, "free-stream preservation", worst <= kFreeStreamTol,
         format("both figure meshes at N = 40, stabilized, 100 steps; max per-cell update %.2e (tol %.0e)", worst,
                kFreeStreamTol));
}

void upwind_oracle() {
  const int n = 32;
  const double h = 1.0 / n;
  const auto mesh = generate_mesh(n, std::nullopt, 0.4);
  double worst = 0.0;
  for (int dir = 0; dir < 4; ++dir) {
    const double rho = dir * kPi / 2.0;
    const int bx = static_cast<int>(std::lround(std::cos(rho)));
    const int by = static_cast<int>(std::lround(std::sin(rho)));
    const SystemMatrices sys = build_system(0.0, rho, 0.0, 1);
    const PlaneWaveSolution exact(sys, rho, 0.0);
    const BoundaryData g = [&](const Point& x, double t) { return exact(x, t); };
    const double dt = 0.4 * h;
    StateVector u = project_initial(mesh, exact);
    for (int step = 0; step < 50; ++step) {
      const double t = step * dt;
      const StateVector next = euler_step(u, dt, upwind_residual(mesh, sys, u, g, t));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          // Upstream cell along the grid line, or the boundary value at the inflow face midpoint.
          const int ui = i - bx;
          const int uj = j - by;
          double upstream;
          if (ui < 0 || ui >= n || uj < 0 || uj >= n) {
            const Point mid((i + 0.5 - 0.5 * bx) * h, (j + 0.5 - 0.5 * by) * h);
            upstream = exact(mid, t)(0);
          } else {
            upstream = u.cell(ui * n + uj)(0);
          }
          const double own = u.cell(i * n + j)(0);
          const double expected = own - dt / h * (own - upstream);
          worst = std::max(worst, std::abs(next.cell(i * n + j)(0) - expected));
        }
      }
      u = next;
    }
  }
  report(7, "1D upwind oracle", worst <= kOracleTol,
         format("uncut N = 32, four axis directions, 50 steps each; max per-step deviation %.2e (tol %.0e)", worst,
                kOracleTol));
}

}  // namespace

int main() {
  try {
    weight_conditions();
    quadratic_form();
    const FigureRuns left = figure_runs(false);
    const FigureRuns right = figure_runs(true);
    convergence(left, right);
    overshoot(left, right);
    small_cell_problem();
    free_stream();
    upwind_oracle();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance suite aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
