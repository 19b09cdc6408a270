#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "dodcut/mesh.hpp"

using namespace dodcut;

namespace {

constexpr double kPi = std::numbers::pi;

CutLine line_deg(double x0, double gamma_deg) { return {x0, gamma_deg * kPi / 180.0}; }

Polygon square(double x, double y, double h) { return {{x, y}, {x + h, y}, {x + h, y + h}, {x, y + h}}; }

/// Sum over the cell's faces of |F| times the outward normal.
Point closure(const CutCellMesh& mesh, const Cell& cell) {
  Point sum = Point::Zero();
  for (std::size_t k = 0; k < cell.faces.size(); ++k) {
    const Face& f = mesh.faces[cell.faces[k]];
    sum += cell.face_signs[k] * f.length * f.normal;
  }
  return sum;
}

}  // namespace

TEST_CASE("polygon area") {
  CHECK(polygon_area(square(0.0, 0.0, 1.0)) == doctest::Approx(1.0));
  CHECK(polygon_area({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}) == doctest::Approx(0.5));

  const Point c = polygon_centroid(square(2.0, 3.0, 0.5));
  CHECK(c.x() == doctest::Approx(2.25));
  CHECK(c.y() == doctest::Approx(3.25));

  CHECK_THROWS_AS(polygon_area({{0.0, 0.0}, {1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(polygon_area({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(polygon_area({{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(polygon_area({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("clip a cell that lies entirely below the line") {
  // The line reaches y = tan(40 deg) (0.75 - x0) > 0.25 before x = 0.75.
  const ClipResult r = clip_cell(square(0.75, 0.0, 0.25), line_deg(0.2001, 40.0));
  REQUIRE(r.below.has_value());
  CHECK_FALSE(r.above.has_value());
  CHECK(polygon_area(*r.below) == doctest::Approx(0.0625));
}

TEST_CASE("clip the corner cell of the 40 degree line") {
  const double gamma = 40.0 * kPi / 180.0;
  const ClipResult r = clip_cell(square(0.0, 0.0, 0.25), line_deg(0.2001, 40.0));
  REQUIRE(r.below.has_value());
  REQUIRE(r.above.has_value());

  // Right triangle with legs (0.25 - x0) and tan(gamma) (0.25 - x0).
  const double leg = 0.25 - 0.2001;
  const double height = std::tan(gamma) * leg;
  const double expected = 0.5 * leg * height;
  const Polygon& tri = *r.below;
  REQUIRE(tri.size() == 3);
  CHECK(tri[0].x() == doctest::Approx(0.2001).epsilon(1e-15));
  CHECK(tri[0].y() == 0.0);
  CHECK(tri[1].x() == doctest::Approx(0.25));
  CHECK(tri[2].x() == doctest::Approx(0.25));
  CHECK(tri[2].y() == doctest::Approx(height).epsilon(1e-14));
  CHECK(height == doctest::Approx(0.041871).epsilon(1e-5));
  CHECK(polygon_area(tri) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(polygon_area(tri) == doctest::Approx(1.0447e-3).epsilon(1e-4));
  CHECK(polygon_area(tri) + polygon_area(*r.above) == doctest::Approx(0.0625).epsilon(1e-14));
}

TEST_CASE("a line through a cell corner leaves one side absent") {
  // The diagonal through (0, 0) and (0.5, 0.5) touches the cell [0.5, 1] x [0, 0.5] only at a corner.
  const ClipResult r = clip_cell(square(0.5, 0.0, 0.5), line_deg(0.0, 45.0));
  CHECK(r.below.has_value());
  CHECK_FALSE(r.above.has_value());
  CHECK(polygon_area(*r.below) == doctest::Approx(0.25));
}

TEST_CASE("structured grid census") {
  const CutCellMesh mesh = generate_mesh(4, std::nullopt, 0.4);
  CHECK(mesh.cells.size() == 16);
  const auto interior = std::count_if(mesh.faces.begin(), mesh.faces.end(),
                                      [](const Face& f) { return f.kind == FaceKind::Interior; });
  CHECK(interior == 24);
  CHECK(mesh.faces.size() - interior == 16);
  CHECK(mesh.stabilized.empty());

  // A line that misses the square leaves the grid untouched as well.
  const CutCellMesh missed = generate_mesh(4, line_deg(2.0, 40.0), 0.4);
  CHECK(missed.cells.size() == 16);
  CHECK(missed.faces.size() == 40);
}

TEST_CASE("the corner cut-cell of the N = 4 mesh is stabilized") {
  const CutCellMesh mesh = generate_mesh(4, line_deg(0.2001, 40.0), 0.4);
  const Cell& corner = mesh.cells[0];
  CHECK(corner.i == 0);
  CHECK(corner.j == 0);
  CHECK(corner.side == CellSide::Below);
  CHECK(mesh.volume_fraction(0) == doctest::Approx(0.01672).epsilon(1e-3));
  CHECK(mesh.is_stabilized(0));
  CHECK(corner.faces.size() == 3);
  CHECK(corner.touches_boundary);
}

TEST_CASE("mesh properties over a sweep of cut lines") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> resolution(2, 40);
  std::uniform_real_distribution<double> gamma(5.0, 85.0);
  std::uniform_real_distribution<double> x0(-0.3, 0.9);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = resolution(rng);
    const CutCellMesh mesh = generate_mesh(n, line_deg(x0(rng), gamma(rng)), 0.4);
    const double h = 1.0 / n;
    CAPTURE(n);

    double total = 0.0;
    for (const Cell& cell : mesh.cells) {
      total += cell.area;
      CHECK(cell.area > 0.0);
      CHECK(closure(mesh, cell).norm() < 1e-13);
      CHECK(cell.area == doctest::Approx(polygon_area(cell.polygon)).epsilon(1e-14));
      for (std::size_t k = 0; k < cell.faces.size(); ++k) {
        const Face& f = mesh.faces[cell.faces[k]];
        CHECK((f.inner == cell.id || f.outer == cell.id));
        CHECK(cell.face_signs[k] == (f.inner == cell.id ? 1 : -1));
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

    // Fragments of each background edge add up to h.
    std::map<std::pair<long, long>, double> vertical;
    std::map<std::pair<long, long>, double> horizontal;
    for (const Face& f : mesh.faces) {
      CHECK(std::abs(f.normal.norm() - 1.0) < 1e-14);
      CHECK(f.length > 0.0);
      if (f.kind == FaceKind::Exterior) CHECK(f.outer == kBoundary);
      if (std::abs(f.normal.x()) == 1.0 && f.a.x() == f.b.x()) {
        vertical[{std::lround(f.a.x() / h), static_cast<long>(std::floor(f.midpoint().y() / h))}] += f.length;
      } else if (std::abs(f.normal.y()) == 1.0 && f.a.y() == f.b.y()) {
        horizontal[{std::lround(f.a.y() / h), static_cast<long>(std::floor(f.midpoint().x() / h))}] += f.length;
      }
    }
    CHECK(vertical.size() == static_cast<std::size_t>(n * (n + 1)));
    CHECK(horizontal.size() == static_cast<std::size_t>(n * (n + 1)));
    for (const auto& [key, length] : vertical) CHECK(std::abs(length - h) < 1e-13);
    for (const auto& [key, length] : horizontal) CHECK(std::abs(length - h) < 1e-13);

    // The stabilized set is exactly the cells below the threshold.
    for (const Cell& cell : mesh.cells) {
      CHECK(mesh.is_stabilized(cell.id) == (mesh.volume_fraction(cell.id) < 0.4));
    }
  }
}

TEST_CASE("cut faces point from below to above") {
  const CutCellMesh mesh = generate_mesh(10, line_deg(0.2001, 40.0), 0.4);
  const CutLine line = *mesh.line;
  int cut_faces = 0;
  for (const Face& f : mesh.faces) {
    if (f.kind != FaceKind::Interior) continue;
    const Cell& in = mesh.cells[f.inner];
    const Cell& out = mesh.cells[f.outer];
    if (in.i != out.i || in.j != out.j) continue;
    ++cut_faces;
    CHECK(in.side == CellSide::Below);
    CHECK(out.side == CellSide::Above);
    CHECK((f.normal - line.normal()).norm() < 1e-14);
    CHECK(std::abs(line.signed_distance(f.a)) < 1e-13);
    CHECK(std::abs(line.signed_distance(f.b)) < 1e-13);
  }
  CHECK(cut_faces > 0);
}

TEST_CASE("cells are ordered by background index with below before above") {
  const CutCellMesh mesh = generate_mesh(12, line_deg(0.2001, 30.0), 0.4);
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) CHECK(mesh.cells[c].id == static_cast<int>(c));
  for (std::size_t c = 1; c < mesh.cells.size(); ++c) {
    const Cell& a = mesh.cells[c - 1];
    const Cell& b = mesh.cells[c];
    const bool ordered = std::pair(a.i, a.j) < std::pair(b.i, b.j) ||
                         (a.i == b.i && a.j == b.j && a.side == CellSide::Below && b.side == CellSide::Above);
    CHECK(ordered);
  }
}

TEST_CASE("mesh generation is deterministic") {
  const CutCellMesh a = generate_mesh(17, line_deg(0.2001, 40.0), 0.4);
  const CutCellMesh b = generate_mesh(17, line_deg(0.2001, 40.0), 0.4);
  REQUIRE(a.cells.size() == b.cells.size());
  REQUIRE(a.faces.size() == b.faces.size());
  for (std::size_t c = 0; c < a.cells.size(); ++c) {
    CHECK(a.cells[c].polygon == b.cells[c].polygon);
    CHECK(a.cells[c].faces == b.cells[c].faces);
  }
  for (std::size_t f = 0; f < a.faces.size(); ++f) {
    CHECK(a.faces[f].a == b.faces[f].a);
    CHECK(a.faces[f].b == b.faces[f].b);
    CHECK(a.faces[f].inner == b.faces[f].inner);
    CHECK(a.faces[f].outer == b.faces[f].outer);
  }
  CHECK(a.stabilized == b.stabilized);
}

TEST_CASE("invalid mesh requests are rejected") {
  CHECK_THROWS_AS(generate_mesh(1, std::nullopt, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(generate_mesh(8, std::nullopt, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(generate_mesh(8, line_deg(0.2, 0.0), 0.4), std::invalid_argument);
  CHECK_THROWS_AS(generate_mesh(8, line_deg(0.2, 90.0), 0.4), std::invalid_argument);
}
