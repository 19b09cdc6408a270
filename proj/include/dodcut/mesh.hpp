#pragma once

#include <optional>
#include <vector>

#include "dodcut/linalg.hpp"

namespace dodcut {

/// Straight cut through (x0, 0) at angle gamma against the x-axis.
struct CutLine {
  double x0 = 0.0;
  double gamma = 0.0;

  Point origin() const { return {x0, 0.0}; }
  Point direction() const;
  /// Left normal of the direction; points from the below side to the above side.
  Point normal() const;
  /// Affine signed distance; negative below the cut, positive above.
  double signed_distance(const Point& p) const;
};

/// Ordered vertex list. Closed implicitly (last vertex connects to first).
using Polygon = std::vector<Point>;

/// Shoelace area of a simple counter-clockwise polygon. Throws
/// std::invalid_argument for fewer than three vertices, clockwise or
/// zero-area input, or self-intersecting edges.
double polygon_area(const Polygon& polygon);
Point polygon_centroid(const Polygon& polygon);

struct ClipResult {
  std::optional<Polygon> below;
  std::optional<Polygon> above;
};

/// Splits an axis-aligned grid cell along `line`. Vertices closer than
/// 1e-12 h to the line are snapped onto it, and a piece whose area is below
/// 1e-14 h^2 is reported absent. Pieces are returned counter-clockwise,
/// starting at the lowest (then leftmost) vertex.
ClipResult clip_cell(const Polygon& square, const CutLine& line);

enum class CellSide { Uncut, Below, Above };
enum class FaceKind { Interior, Exterior };

inline constexpr int kBoundary = -1;

struct Cell {
  int id = 0;
  int i = 0;  // background column
  int j = 0;  // background row
  CellSide side = CellSide::Uncut;
  Polygon polygon;
  double area = 0.0;
  Point centroid = Point::Zero();
  std::vector<int> faces;       // ids into CutCellMesh::faces, ascending
  std::vector<int> face_signs;  // +1 if this cell is the face's inner cell
  bool touches_boundary = false;
};

/// A face carries one fixed unit normal pointing from `inner` to `outer`.
/// Exterior faces have outer == kBoundary and the outward domain normal.
struct Face {
  int id = 0;
  Point a = Point::Zero();
  Point b = Point::Zero();
  double length = 0.0;
  Point normal = Point::Zero();
  int inner = 0;
  int outer = kBoundary;
  FaceKind kind = FaceKind::Interior;

  Point midpoint() const { return 0.5 * (a + b); }
  /// The cell across the face from `cell`, or kBoundary.
  int neighbor(int cell) const { return cell == inner ? outer : inner; }
};

struct CutCellMesh {
  int n = 0;
  double h = 0.0;
  std::optional<CutLine> line;
  double vf_threshold = 0.0;
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<int> stabilized;  // cells with volume fraction below vf_threshold

  double volume_fraction(int cell) const { return cells[cell].area / (h * h); }
  bool is_stabilized(int cell) const;
};

/// Structured n x n grid on the unit square with every background cell
/// crossed by `line` split into a below and an above cut-cell. Cells are
/// ordered by background (i, j) lexicographically, below piece before above
/// piece. Throws std::invalid_argument for n < 2, a non-positive threshold,
/// or a line (nearly) parallel to the grid lines. A line that misses the
/// square, or std::nullopt, yields the plain structured grid.
CutCellMesh generate_mesh(int n, const std::optional<CutLine>& line,
                          double vf_threshold);

}  // namespace dodcut
