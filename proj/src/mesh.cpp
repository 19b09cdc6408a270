#include "dodcut/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dodcut {

namespace {

constexpr double kSnapFactor = 1e-12;  // times h
constexpr double kAreaFactor = 1e-14;  // times h^2

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Polygon& p) {
  double twice = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    twice += cross(p[k], p[(k + 1) % p.size()]);
  }
  return 0.5 * twice;
}

bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return d1 * d2 < 0.0 && d3 * d4 < 0.0;
}

bool lex_less(const Point& a, const Point& b) {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

// Point where the segment crosses the line. The endpoints are put in a
// canonical order first so that two cells sharing an edge compute a
// bitwise-identical point.
Point crossing(Point a, double sa, Point b, double sb) {
  if (lex_less(b, a)) {
    std::swap(a, b);
    std::swap(sa, sb);
  }
  const double t = sa / (sa - sb);
  return a + t * (b - a);
}

double snapped_distance(const CutLine& line, const Point& p, double tol) {
  const double s = line.signed_distance(p);
  return std::abs(s) <= tol ? 0.0 : s;
}

int sign_of(double s) { return (s > 0.0) - (s < 0.0); }

Polygon normalized(Polygon p) {
  Polygon out;
  for (const auto& v : p) {
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  const auto lowest = std::min_element(out.begin(), out.end(), [](const Point& a, const Point& b) {
    return a.y() < b.y() || (a.y() == b.y() && a.x() < b.x());
  });
  std::rotate(out.begin(), lowest, out.end());
  return out;
}

std::optional<Polygon> accept_piece(Polygon p, double min_area) {
  p = normalized(std::move(p));
  if (p.size() < 3) return std::nullopt;
  if (signed_area(p) < min_area) return std::nullopt;
  return p;
}

double grid_coordinate(int i, int n) { return static_cast<double>(i) / static_cast<double>(n); }

}  // namespace

Point CutLine::direction() const { return {std::cos(gamma), std::sin(gamma)}; }

Point CutLine::normal() const { return {-std::sin(gamma), std::cos(gamma)}; }

double CutLine::signed_distance(const Point& p) const { return (p - origin()).dot(normal()); }

double polygon_area(const Polygon& polygon) {
  if (polygon.size() < 3) {
    throw std::invalid_argument("polygon_area: need at least three vertices");
  }
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 2; l < n; ++l) {
      if (k == 0 && l == n - 1) continue;  // adjacent through the closing edge
      if (segments_cross(polygon[k], polygon[(k + 1) % n], polygon[l], polygon[(l + 1) % n])) {
        throw std::invalid_argument("polygon_area: self-intersecting polygon");
      }
    }
  }
  const double area = signed_area(polygon);
  if (!(area > 0.0)) {
    throw std::invalid_argument("polygon_area: polygon is not counter-clockwise");
  }
  return area;
}

Point polygon_centroid(const Polygon& polygon) {
  // Relative to the first vertex to limit cancellation on tiny cells.
  const Point origin = polygon.front();
  double twice_area = 0.0;
  Point moment = Point::Zero();
  for (std::size_t k = 0; k < polygon.size(); ++k) {
    const Point p = polygon[k] - origin;
    const Point q = polygon[(k + 1) % polygon.size()] - origin;
    const double c = cross(p, q);
    twice_area += c;
    moment += c * (p + q);
  }
  return origin + moment / (3.0 * twice_area);
}

namespace {

ClipResult clip_with_scale(const Polygon& square, const CutLine& line, double h) {
  const double tol = kSnapFactor * h;

  std::vector<double> dist;
  dist.reserve(square.size());
  for (const auto& v : square) dist.push_back(snapped_distance(line, v, tol));

  Polygon below, above;
  for (std::size_t k = 0; k < square.size(); ++k) {
    const std::size_t next = (k + 1) % square.size();
    const Point& v = square[k];
    if (dist[k] <= 0.0) below.push_back(v);
    if (dist[k] >= 0.0) above.push_back(v);
    if (sign_of(dist[k]) * sign_of(dist[next]) < 0) {
      const Point x = crossing(v, dist[k], square[next], dist[next]);
      below.push_back(x);
      above.push_back(x);
    }
  }
  const double min_area = kAreaFactor * h * h;
  return {accept_piece(std::move(below), min_area), accept_piece(std::move(above), min_area)};
}

}  // namespace

ClipResult clip_cell(const Polygon& square, const CutLine& line) {
  double lo = square.front().x(), hi = square.front().x();
  for (const auto& v : square) {
    lo = std::min(lo, v.x());
    hi = std::max(hi, v.x());
  }
  return clip_with_scale(square, line, hi - lo);
}

bool CutCellMesh::is_stabilized(int cell) const {
  return std::binary_search(stabilized.begin(), stabilized.end(), cell);
}

CutCellMesh generate_mesh(int n, const std::optional<CutLine>& line, double vf_threshold) {
  if (n < 2) throw std::invalid_argument("generate_mesh: N must be at least 2");
  if (!(vf_threshold > 0.0)) {
    throw std::invalid_argument("generate_mesh: volume fraction threshold must be positive");
  }
  const double h = 1.0 / static_cast<double>(n);
  const double tol = kSnapFactor * h;
  if (line) {
    if (std::abs(std::sin(line->gamma)) <= tol || std::abs(std::cos(line->gamma)) <= tol) {
      throw std::invalid_argument("generate_mesh: cut is parallel to a grid line (gamma = " +
                                  std::to_string(line->gamma) + ")");
    }
  }

  CutCellMesh mesh;
  mesh.n = n;
  mesh.h = h;
  mesh.line = line;
  mesh.vf_threshold = vf_threshold;

  // piece[bg][0] is the cell on the below side, piece[bg][1] the above side.
  // Both entries coincide for an uncut background cell.
  std::vector<std::array<int, 2>> piece(static_cast<std::size_t>(n) * n);
  auto bg = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };

  auto add_cell = [&](int i, int j, CellSide side, Polygon poly) {
    Cell c;
    c.id = static_cast<int>(mesh.cells.size());
    c.i = i;
    c.j = j;
    c.side = side;
    c.area = polygon_area(poly);
    c.centroid = polygon_centroid(poly);
    c.polygon = std::move(poly);
    mesh.cells.push_back(std::move(c));
    return mesh.cells.back().id;
  };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x0 = grid_coordinate(i, n), x1 = grid_coordinate(i + 1, n);
      const double y0 = grid_coordinate(j, n), y1 = grid_coordinate(j + 1, n);
      Polygon square{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
      if (line) {
        auto clipped = clip_with_scale(square, *line, h);
        if (clipped.below && clipped.above) {
          const int b = add_cell(i, j, CellSide::Below, std::move(*clipped.below));
          const int a = add_cell(i, j, CellSide::Above, std::move(*clipped.above));
          piece[bg(i, j)] = {b, a};
          continue;
        }
      }
      const int c = add_cell(i, j, CellSide::Uncut, std::move(square));
      piece[bg(i, j)] = {c, c};
    }
  }

  auto add_face = [&](const Point& a, const Point& b, const Point& normal, int inner, int outer) {
    Face f;
    f.id = static_cast<int>(mesh.faces.size());
    f.a = a;
    f.b = b;
    f.length = (b - a).norm();
    f.normal = normal;
    f.inner = inner;
    f.outer = outer;
    f.kind = outer == kBoundary ? FaceKind::Exterior : FaceKind::Interior;
    mesh.faces.push_back(f);
  };

  // A grid edge separates `lo_cell` (left/bottom) from `hi_cell` (right/top);
  // either may be -1 on the domain boundary. The edge is split where the cut
  // crosses it, and each fragment attaches to the piece on its side.
  auto add_grid_edge = [&](const Point& p, const Point& q, const Point& normal, int lo_bg, int hi_bg) {
    struct Fragment {
      Point a, b;
      int side;
    };
    std::vector<Fragment> fragments;
    if (line) {
      const double sp = snapped_distance(*line, p, tol);
      const double sq = snapped_distance(*line, q, tol);
      if (sign_of(sp) * sign_of(sq) < 0) {
        const Point x = crossing(p, sp, q, sq);
        fragments.push_back({p, x, sp > 0.0 ? 1 : 0});
        fragments.push_back({x, q, sq > 0.0 ? 1 : 0});
      } else {
        fragments.push_back({p, q, (sp > 0.0 || sq > 0.0) ? 1 : 0});
      }
    } else {
      fragments.push_back({p, q, 0});
    }
    for (const auto& fr : fragments) {
      const int lo = lo_bg < 0 ? kBoundary : piece[lo_bg][fr.side];
      const int hi = hi_bg < 0 ? kBoundary : piece[hi_bg][fr.side];
      if (lo == kBoundary) {
        add_face(fr.a, fr.b, -normal, hi, kBoundary);
      } else {
        add_face(fr.a, fr.b, normal, lo, hi);
      }
    }
  };

  // Vertical grid edges x = const, normal +x.
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Point p{grid_coordinate(i, n), grid_coordinate(j, n)};
      const Point q{grid_coordinate(i, n), grid_coordinate(j + 1, n)};
      const int left = i > 0 ? static_cast<int>(bg(i - 1, j)) : -1;
      const int right = i < n ? static_cast<int>(bg(i, j)) : -1;
      add_grid_edge(p, q, Point{1.0, 0.0}, left, right);
    }
  }
  // Horizontal grid edges y = const, normal +y.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const Point p{grid_coordinate(i, n), grid_coordinate(j, n)};
      const Point q{grid_coordinate(i + 1, n), grid_coordinate(j, n)};
      const int bottom = j > 0 ? static_cast<int>(bg(i, j - 1)) : -1;
      const int top = j < n ? static_cast<int>(bg(i, j)) : -1;
      add_grid_edge(p, q, Point{0.0, 1.0}, bottom, top);
    }
  }
  // Cut segments, oriented from the below piece into the above piece.
  if (line) {
    for (std::size_t b = 0; b < piece.size(); ++b) {
      const auto [lo, hi] = piece[b];
      if (lo == hi) continue;
      std::vector<Point> on_line;
      for (const auto& v : mesh.cells[lo].polygon) {
        if (snapped_distance(*line, v, tol) == 0.0) on_line.push_back(v);
      }
      if (on_line.size() != 2) {
        throw std::logic_error("generate_mesh: cut segment of cell " + std::to_string(lo) +
                               " has " + std::to_string(on_line.size()) + " vertices on the line");
      }
      const Point d = line->direction();
      if (on_line[0].dot(d) > on_line[1].dot(d)) std::swap(on_line[0], on_line[1]);
      add_face(on_line[0], on_line[1], line->normal(), lo, hi);
    }
  }

  for (const auto& f : mesh.faces) {
    mesh.cells[f.inner].faces.push_back(f.id);
    mesh.cells[f.inner].face_signs.push_back(1);
    if (f.outer == kBoundary) {
      mesh.cells[f.inner].touches_boundary = true;
    } else {
      mesh.cells[f.outer].faces.push_back(f.id);
      mesh.cells[f.outer].face_signs.push_back(-1);
    }
  }

  for (const auto& c : mesh.cells) {
    if (mesh.volume_fraction(c.id) < vf_threshold) mesh.stabilized.push_back(c.id);
  }
  return mesh;
}

}  // namespace dodcut
