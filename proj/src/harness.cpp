#include "dodcut/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dodcut {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_factor(const std::string& token, const std::string& whole) {
  const std::string t = trim(token);
  if (t.empty()) throw std::invalid_argument("malformed number '" + whole + "'");
  if (t == "pi") return std::numbers::pi;
  if (t == "-pi") return -std::numbers::pi;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed number '" + whole + "'");
  }
  const std::string rest = trim(t.substr(used));
  if (rest == "pi") return value * std::numbers::pi;
  if (!rest.empty()) throw std::invalid_argument("malformed number '" + whole + "'");
  return value;
}

int parse_int(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument("config key '" + key + "' expects an integer, got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  throw std::invalid_argument("config key '" + key + "' expects a boolean, got '" + text + "'");
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

const char* side_name(CellSide side) {
  switch (side) {
    case CellSide::Uncut: return "uncut";
    case CellSide::Below: return "below";
    case CellSide::Above: return "above";
  }
  return "?";
}

}  // namespace

double parse_scalar_expression(const std::string& text) {
  const std::string s = trim(text);
  double value = 1.0;
  char op = '*';
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k) {
    if (k == s.size() || s[k] == '*' || s[k] == '/') {
      const double f = parse_factor(s.substr(start, k - start), text);
      value = op == '*' ? value * f : value / f;
      if (k < s.size()) op = s[k];
      start = k + 1;
    }
  }
  return value;
}

ProblemConfig parse_config(std::istream& in) {
  ProblemConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "N") {
      cfg.n = parse_int(value, key);
    } else if (key == "x0") {
      cfg.x0 = parse_scalar_expression(value);
    } else if (key == "gamma_deg") {
      cfg.gamma_deg = parse_scalar_expression(value);
    } else if (key == "theta") {
      cfg.theta = parse_scalar_expression(value);
    } else if (key == "rho1") {
      cfg.rho1 = parse_scalar_expression(value);
    } else if (key == "rho2") {
      cfg.rho2 = parse_scalar_expression(value);
    } else if (key == "m") {
      cfg.m = parse_int(value, key);
    } else if (key == "T") {
      cfg.final_time = parse_scalar_expression(value);
    } else if (key == "cfl") {
      cfg.cfl = parse_scalar_expression(value);
    } else if (key == "vf_threshold") {
      cfg.vf_threshold = parse_scalar_expression(value);
    } else if (key == "stabilize") {
      cfg.stabilize = parse_bool(value, key);
    } else if (key == "eta_mode") {
      cfg.eta.mode = parse_eta_mode(value);
    } else if (key == "eta_value") {
      cfg.eta.value = parse_scalar_expression(value);
    } else if (key == "seed") {
      std::size_t used = 0;
      try {
        cfg.seed = static_cast<std::uint64_t>(std::stoull(value, &used));
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size() || value.front() == '-') {
        throw std::invalid_argument("config key 'seed' expects a nonnegative integer, got '" + value + "'");
      }
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  return parse_config(in);
}

bool ConvergenceTable::errors_decrease() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].l1 < rows[k - 1].l1) || !(rows[k].linf < rows[k - 1].linf)) return false;
  }
  return true;
}

double observed_order(double e_prev, double e, double h_prev, double h) {
  return std::log(e_prev / e) / std::log(h_prev / h);
}

ConvergenceTable converge(const ProblemConfig& cfg, const std::vector<int>& resolutions) {
  if (resolutions.size() < 3) throw std::invalid_argument("converge: need at least three resolutions");
  if (!std::is_sorted(resolutions.begin(), resolutions.end()) ||
      std::adjacent_find(resolutions.begin(), resolutions.end()) != resolutions.end()) {
    throw std::invalid_argument("converge: resolutions must be strictly ascending");
  }
  ConvergenceTable table;
  for (int n : resolutions) {
    ProblemConfig c = cfg;
    c.n = n;
    RunReport r;
    try {
      r = run(c);
    } catch (const std::exception& e) {
      throw std::runtime_error("converge: run with N = " + std::to_string(n) + " failed: " + e.what());
    }
    ConvergenceRow row;
    row.n = n;
    row.h = r.h;
    row.dt = r.dt;
    row.l1 = r.l1;
    row.linf = r.linf;
    row.order_l1 = std::numeric_limits<double>::quiet_NaN();
    row.order_linf = std::numeric_limits<double>::quiet_NaN();
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      row.order_l1 = observed_order(prev.l1, row.l1, prev.h, row.h);
      row.order_linf = observed_order(prev.linf, row.linf, prev.h, row.h);
    }
    table.rows.push_back(row);
  }
  return table;
}

Vector decay_bump(const SystemMatrices& sys, const Point& x) {
  constexpr double radius = 0.2;
  const double r = (x - Point(0.5, 0.35)).norm();
  const double w = r < radius ? 0.5 * (1.0 + std::cos(std::numbers::pi * r / radius)) : 0.0;
  return sys.from_characteristic(Vector::Constant(sys.dim(), w));
}

DecayReport l2_decay_experiment(const ProblemConfig& cfg) {
  cfg.validate();
  const auto mesh = generate_mesh(cfg.n, cfg.cut_line(), cfg.vf_threshold);
  const SystemMatrices sys = cfg.system();
  SimulationSetup setup;
  setup.initial = [&](const Point& x) { return decay_bump(sys, x); };
  setup.boundary = homogeneous_boundary(sys.dim());
  DecayReport report;
  report.run = simulate(cfg, mesh, setup);
  report.max_increase = report.run.max_l2_increase();
  report.passed = report.max_increase <= kDecayTolerance;
  return report;
}

CheckReport check(const ProblemConfig& cfg, int trials) {
  cfg.validate();
  const auto mesh = generate_mesh(cfg.n, cfg.cut_line(), cfg.vf_threshold);
  const SystemMatrices sys = cfg.system();
  const auto stab = build_stabilization(mesh, sys, eta_settings(cfg));
  CheckReport report;
  report.weights = verify_weights(mesh, sys, stab);
  report.min_rayleigh_stabilized = quadratic_form_check(mesh, sys, stab, trials, cfg.seed);
  report.min_rayleigh_unstabilized = quadratic_form_check(mesh, sys, {}, trials, cfg.seed);
  report.passed = failing_cells(report.weights).empty() &&
                  report.min_rayleigh_stabilized >= kRayleighTolerance &&
                  report.min_rayleigh_unstabilized >= kRayleighTolerance;
  return report;
}

void write_mesh_csv(const CutCellMesh& mesh, const std::filesystem::path& cells_path,
                    const std::filesystem::path& faces_path) {
  auto cells = open_csv(cells_path);
  cells << "id,i,j,side,area,volume_fraction,stabilized\n";
  for (const auto& c : mesh.cells) {
    cells << c.id << ',' << c.i << ',' << c.j << ',' << side_name(c.side) << ',' << c.area << ','
          << mesh.volume_fraction(c.id) << ',' << (mesh.is_stabilized(c.id) ? 1 : 0) << '\n';
  }
  auto faces = open_csv(faces_path);
  faces << "id,kind,length,nx,ny,inner,outer\n";
  for (const auto& f : mesh.faces) {
    faces << f.id << ',' << (f.kind == FaceKind::Interior ? "interior" : "exterior") << ',' << f.length << ','
          << f.normal.x() << ',' << f.normal.y() << ',' << f.inner << ',' << f.outer << '\n';
  }
}

void write_report_csv(const RunReport& report, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "step,t,l2_norm,w_min,w_max\n";
  for (const auto& r : report.history) {
    out << r.step << ',' << r.t << ',' << r.l2_norm << ',' << r.w_min << ',' << r.w_max << '\n';
  }
}

void write_summary_csv(const RunReport& report, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "N,dt,steps,L1,Linf\n";
  out << report.n << ',' << report.dt << ',' << report.steps << ',' << report.l1 << ',' << report.linf << '\n';
}

void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "N,h,dt,L1,Linf,order_L1,order_Linf\n";
  for (const auto& r : table.rows) {
    out << r.n << ',' << r.h << ',' << r.dt << ',' << r.l1 << ',' << r.linf << ',';
    if (std::isnan(r.order_l1)) {
      out << ",\n";
    } else {
      out << r.order_l1 << ',' << r.order_linf << '\n';
    }
  }
}

void write_decay_csv(const DecayReport& report, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "step,t,l2_norm\n";
  for (const auto& r : report.run.history) out << r.step << ',' << r.t << ',' << r.l2_norm << '\n';
}

void write_check_csv(const CheckReport& report, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "cell_id,eq8_err,eq9_err,sym_err,min_eig,eta\n";
  for (const auto& d : report.weights) {
    out << d.cell << ',' << d.sum_error << ',' << d.redistribution_error << ',' << d.symmetry_error << ','
        << d.min_eigenvalue << ',' << d.eta << '\n';
  }
}

}  // namespace dodcut
