#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dodcut/mesh.hpp"
#include "dodcut/scheme.hpp"
#include "dodcut/stabilization.hpp"

namespace dodcut {

inline constexpr double kBoundTolerance = 1e-10;
inline constexpr double kDecayTolerance = 1e-12;
inline constexpr double kRayleighTolerance = -1e-10;

/// Numeric config value. Accepts plain numbers and products/quotients of
/// numbers and `pi`, e.g. "7*pi/4", "4pi/3", "-0.5".
double parse_scalar_expression(const std::string& text);

/// key = value lines, '#' starts a comment. Recognized keys: N, x0,
/// gamma_deg, theta, rho1, rho2, m, T, cfl, vf_threshold, stabilize,
/// eta_mode, eta_value, seed. Throws std::invalid_argument on unknown keys
/// or malformed values; the result is validated.
ProblemConfig parse_config(std::istream& in);
ProblemConfig load_config(const std::filesystem::path& path);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  double l1 = 0.0;
  double linf = 0.0;
  double order_l1 = 0.0;    // NaN in the first row
  double order_linf = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // ascending N

  bool errors_decrease() const;
};

/// log(e_prev / e) / log(h_prev / h)
double observed_order(double e_prev, double e, double h_prev, double h);

/// One run per resolution. Requires at least three ascending resolutions.
ConvergenceTable converge(const ProblemConfig& cfg, const std::vector<int>& resolutions);

struct DecayReport {
  RunReport run;
  double max_increase = 0.0;
  bool passed = false;
};

/// Radial cosine bump of radius 0.2 around (0.5, 0.35) in every
/// characteristic component.
Vector decay_bump(const SystemMatrices& sys, const Point& x);

/// Bump initial data, homogeneous boundary data. Passes when no step raises
/// the L2 norm by more than kDecayTolerance.
DecayReport l2_decay_experiment(const ProblemConfig& cfg);

struct CheckReport {
  std::vector<WeightDiagnostics> weights;
  double min_rayleigh_stabilized = 0.0;
  double min_rayleigh_unstabilized = 0.0;
  bool passed = false;
};

CheckReport check(const ProblemConfig& cfg, int trials);

void write_mesh_csv(const CutCellMesh& mesh, const std::filesystem::path& cells_path,
                    const std::filesystem::path& faces_path);
void write_report_csv(const RunReport& report, const std::filesystem::path& path);
void write_summary_csv(const RunReport& report, const std::filesystem::path& path);
void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path);
void write_decay_csv(const DecayReport& report, const std::filesystem::path& path);
void write_check_csv(const CheckReport& report, const std::filesystem::path& path);

}  // namespace dodcut
