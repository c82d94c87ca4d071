#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace topoflow {

// Inlet/outlet strip on the vertical sides of the unit square.
inline constexpr double kInletYMin = 0.35;
inline constexpr double kInletYMax = 0.65;

enum class BoundaryTag { Inlet, Outlet, Wall };

struct BoundaryEdge {
  int v0 = -1;
  int v1 = -1;
  BoundaryTag tag = BoundaryTag::Wall;
};

// Conforming triangulation of the hold-all box (0,1) x (0,1).
// Triangles are counter-clockwise, boundary edges cover the full perimeter
// and each carries exactly one tag.
struct TriMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  Eigen::VectorXd element_areas;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_triangles() const { return static_cast<int>(triangles.rows()); }

  Eigen::Vector2d vertex(int i) const { return vertices.row(i).transpose(); }
  double total_area() const { return element_areas.sum(); }
};

using WarnFn = std::function<void(const std::string&)>;

// Uniform n x n grid of the unit square, every cell split along the
// lower-left to upper-right diagonal: (n+1)^2 vertices, 2 n^2 triangles.
// Boundary edges are discovered and tagged. Warns (by default on stderr)
// when the discrete inlet strip cannot align with y = 0.35 / 0.65, i.e.
// when 0.35*n is not an integer.
TriMesh build_unit_square_mesh(int n, const WarnFn& warn = {});

// Re-classifies every boundary edge by its midpoint: Inlet on x=0 with
// 0.35 <= y <= 0.65, Outlet mirrored on x=1, Wall elsewhere. Total: every
// edge receives exactly one tag.
TriMesh tag_boundary(TriMesh mesh);

// Outward unit normal of an axis-aligned boundary edge of the unit square.
Eigen::Vector2d boundary_normal(const TriMesh& mesh, const BoundaryEdge& edge);

}  // namespace topoflow
