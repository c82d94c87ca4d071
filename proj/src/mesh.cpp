#include "topoflow/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <stdexcept>

namespace topoflow {

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (c.x() - a.x()) * (b.y() - a.y()));
}

constexpr double kGeomTol = 1e-12;

}  // namespace

TriMesh build_unit_square_mesh(int n, const WarnFn& warn) {
  if (n < 1) {
    throw std::invalid_argument("build_unit_square_mesh: n must be >= 1");
  }

  TriMesh mesh;
  const int nv = (n + 1) * (n + 1);
  mesh.vertices.resize(nv, 2);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const int v = j * (n + 1) + i;
      mesh.vertices(v, 0) = static_cast<double>(i) / n;
      mesh.vertices(v, 1) = static_cast<double>(j) / n;
    }
  }

  mesh.triangles.resize(2 * n * n, 3);
  int t = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * (n + 1) + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + (n + 1);
      const int v11 = v01 + 1;
      mesh.triangles.row(t++) << v00, v10, v11;
      mesh.triangles.row(t++) << v00, v11, v01;
    }
  }

  mesh.element_areas.resize(mesh.num_triangles());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const double a = signed_area(mesh.vertex(mesh.triangles(e, 0)),
                                 mesh.vertex(mesh.triangles(e, 1)),
                                 mesh.vertex(mesh.triangles(e, 2)));
    if (a <= 0.0) {
      throw std::logic_error("build_unit_square_mesh: non-positive triangle area");
    }
    mesh.element_areas[e] = a;
  }

  // Boundary edges, enumerated side by side in index order.
  mesh.boundary_edges.reserve(4 * n);
  for (int i = 0; i < n; ++i) {  // bottom, y = 0
    mesh.boundary_edges.push_back({i, i + 1, BoundaryTag::Wall});
  }
  for (int j = 0; j < n; ++j) {  // right, x = 1
    mesh.boundary_edges.push_back({j * (n + 1) + n, (j + 1) * (n + 1) + n, BoundaryTag::Wall});
  }
  for (int i = 0; i < n; ++i) {  // top, y = 1
    mesh.boundary_edges.push_back({n * (n + 1) + i, n * (n + 1) + i + 1, BoundaryTag::Wall});
  }
  for (int j = 0; j < n; ++j) {  // left, x = 0
    mesh.boundary_edges.push_back({j * (n + 1), (j + 1) * (n + 1), BoundaryTag::Wall});
  }

  if ((7 * n) % 20 != 0) {
    const std::string msg =
        "mesh: inlet strip bounds y=0.35/0.65 do not fall on grid lines for n=" +
        std::to_string(n) + "; discrete inlet length deviates from 0.3";
    if (warn) {
      warn(msg);
    } else {
      std::cerr << "warning: " << msg << "\n";
    }
  }

  return tag_boundary(std::move(mesh));
}

TriMesh tag_boundary(TriMesh mesh) {
  for (auto& edge : mesh.boundary_edges) {
    const Eigen::Vector2d mid =
        0.5 * (mesh.vertex(edge.v0) + mesh.vertex(edge.v1));
    const bool in_strip =
        mid.y() >= kInletYMin - kGeomTol && mid.y() <= kInletYMax + kGeomTol;
    if (std::abs(mid.x()) < kGeomTol && in_strip) {
      edge.tag = BoundaryTag::Inlet;
    } else if (std::abs(mid.x() - 1.0) < kGeomTol && in_strip) {
      edge.tag = BoundaryTag::Outlet;
    } else {
      edge.tag = BoundaryTag::Wall;
    }
  }
  return mesh;
}

Eigen::Vector2d boundary_normal(const TriMesh& mesh, const BoundaryEdge& edge) {
  const Eigen::Vector2d mid = 0.5 * (mesh.vertex(edge.v0) + mesh.vertex(edge.v1));
  if (std::abs(mid.x()) < kGeomTol) return {-1.0, 0.0};
  if (std::abs(mid.x() - 1.0) < kGeomTol) return {1.0, 0.0};
  if (std::abs(mid.y()) < kGeomTol) return {0.0, -1.0};
  if (std::abs(mid.y() - 1.0) < kGeomTol) return {0.0, 1.0};
  throw std::invalid_argument("boundary_normal: edge is not on the unit-square boundary");
}

}  // namespace topoflow
