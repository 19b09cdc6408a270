// Command line driver: mesh census, single runs, convergence sweeps, weight
// and energy checks, and the L2 decay experiment.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "dodcut/harness.hpp"

namespace fs = std::filesystem;
using namespace dodcut;

namespace {

struct CommonOptions {
  std::string config;
  std::vector<int> n;
  std::string out = ".";
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config, "key = value problem configuration")->check(CLI::ExistingFile);
  sub->add_option("--N", opts.n, "background resolution(s), comma separated")->delimiter(',');
  sub->add_option("--out", opts.out, "output directory");
}

ProblemConfig resolve(const CommonOptions& opts) {
  ProblemConfig cfg = opts.config.empty() ? ProblemConfig{} : load_config(opts.config);
  if (!opts.n.empty()) cfg.n = opts.n.front();
  cfg.validate();
  return cfg;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

int cmd_mesh(const CommonOptions& opts) {
  const auto cfg = resolve(opts);
  const auto mesh = generate_mesh(cfg.n, cfg.cut_line(), cfg.vf_threshold);
  write_mesh_csv(mesh, fs::path(opts.out) / "mesh_cells.csv", fs::path(opts.out) / "mesh_faces.csv");

  double area = 0.0;
  double closure = 0.0;
  std::vector<Point> sum(mesh.cells.size(), Point::Zero());
  for (const auto& c : mesh.cells) {
    area += c.area;
    for (std::size_t k = 0; k < c.faces.size(); ++k) {
      const auto& f = mesh.faces[c.faces[k]];
      sum[c.id] += c.face_signs[k] * f.length * f.normal;
    }
    closure = std::max(closure, sum[c.id].cwiseAbs().maxCoeff());
  }
  const bool ok = std::abs(area - 1.0) <= 1e-12 && closure <= 1e-12;
  std::cout << "cells " << mesh.cells.size() << ", faces " << mesh.faces.size() << ", stabilized "
            << mesh.stabilized.size() << "\n"
            << "area error " << std::abs(area - 1.0) << ", closure error " << closure << "  " << verdict(ok) << "\n";
  return ok ? 0 : 1;
}

int cmd_run(const CommonOptions& opts) {
  const auto cfg = resolve(opts);
  const auto report = run(cfg);
  write_report_csv(report, fs::path(opts.out) / "report.csv");
  write_summary_csv(report, fs::path(opts.out) / "summary.csv");
  const double violation = report.bound_violation();
  const bool ok = violation <= kBoundTolerance;
  std::cout << "N " << report.n << ", dt " << report.dt << ", steps " << report.steps << ", stabilized cells "
            << report.num_stabilized << "\n"
            << "L1 " << report.l1 << ", Linf " << report.linf << "\n"
            << "bound violation " << violation << "  " << verdict(ok) << "\n";
  return ok ? 0 : 1;
}

int cmd_converge(const CommonOptions& opts) {
  auto base = opts;
  base.n.clear();
  const auto cfg = resolve(base);
  const std::vector<int> ns = opts.n.empty() ? std::vector<int>{20, 40, 80, 160} : opts.n;
  const auto table = converge(cfg, ns);
  write_convergence_csv(table, fs::path(opts.out) / "convergence.csv");
  std::cout << std::setw(6) << "N" << std::setw(14) << "L1" << std::setw(9) << "order" << std::setw(14) << "Linf"
            << std::setw(9) << "order" << "\n";
  const auto flags = std::cout.flags();
  const auto precision = std::cout.precision();
  for (const auto& r : table.rows) {
    std::cout << std::scientific << std::setprecision(4) << std::setw(6) << r.n << std::setw(14) << r.l1;
    std::cout << std::fixed << std::setprecision(3) << std::setw(9) << r.order_l1;
    std::cout << std::scientific << std::setprecision(4) << std::setw(14) << r.linf;
    std::cout << std::fixed << std::setprecision(3) << std::setw(9) << r.order_linf << "\n";
  }
  std::cout.flags(flags);
  std::cout.precision(precision);
  const bool ok = table.errors_decrease();
  std::cout << "errors decrease monotonically  " << verdict(ok) << "\n";
  return ok ? 0 : 1;
}

int cmd_check(const CommonOptions& opts, int trials) {
  const auto cfg = resolve(opts);
  const auto report = check(cfg, trials);
  write_check_csv(report, fs::path(opts.out) / "check.csv");
  const auto bad = failing_cells(report.weights);
  std::cout << "stabilized cells " << report.weights.size() << ", weight failures " << bad.size() << "\n"
            << "min Rayleigh quotient (stabilized)   " << report.min_rayleigh_stabilized << "\n"
            << "min Rayleigh quotient (unstabilized) " << report.min_rayleigh_unstabilized << "\n"
            << verdict(report.passed) << "\n";
  return report.passed ? 0 : 1;
}

int cmd_decay(const CommonOptions& opts) {
  const auto cfg = resolve(opts);
  const auto report = l2_decay_experiment(cfg);
  write_decay_csv(report, fs::path(opts.out) / "decay.csv");
  std::cout << "steps " << report.run.steps << ", L2 " << report.run.history.front().l2_norm << " -> "
            << report.run.history.back().l2_norm << "\n"
            << "max per-step increase " << report.max_increase << "  " << verdict(report.passed) << "\n";
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized upwind scheme on cut-cell meshes"};
  app.require_subcommand(1);

  CommonOptions mesh_opts, run_opts, converge_opts, check_opts, decay_opts;
  int trials = 1000;
  auto* mesh = app.add_subcommand("mesh", "write the cell and face census");
  add_common(mesh, mesh_opts);
  auto* run_cmd = app.add_subcommand("run", "single run; writes report.csv and summary.csv");
  add_common(run_cmd, run_opts);
  auto* conv = app.add_subcommand("converge", "resolution sweep; writes convergence.csv");
  add_common(conv, converge_opts);
  auto* chk = app.add_subcommand("check", "weight conditions and energy check; writes check.csv");
  add_common(chk, check_opts);
  chk->add_option("--trials", trials, "random states for the energy check");
  auto* decay = app.add_subcommand("decay", "L2 decay experiment; writes decay.csv");
  add_common(decay, decay_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mesh) return cmd_mesh(mesh_opts);
    if (*run_cmd) return cmd_run(run_opts);
    if (*conv) return cmd_converge(converge_opts);
    if (*chk) return cmd_check(check_opts, trials);
    if (*decay) return cmd_decay(decay_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
