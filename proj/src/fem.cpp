#include "topoflow/fem.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

namespace topoflow {

namespace {

long long edge_key(int v0, int v1, int n_vertices) {
  const long long a = std::min(v0, v1);
  const long long b = std::max(v0, v1);
  return a * static_cast<long long>(n_vertices) + b;
}

Eigen::Matrix2d element_inv_jacobian_t(const TriMesh& mesh, int e) {
  const Eigen::Vector2d p0 = mesh.vertex(mesh.triangles(e, 0));
  const Eigen::Vector2d p1 = mesh.vertex(mesh.triangles(e, 1));
  const Eigen::Vector2d p2 = mesh.vertex(mesh.triangles(e, 2));
  Eigen::Matrix2d jac;
  jac << p1.x() - p0.x(), p2.x() - p0.x(), p1.y() - p0.y(), p2.y() - p0.y();
  return jac.inverse().transpose();
}

}  // namespace

int P2DofMap::edge_index(int v0, int v1) const {
  const auto it = edge_lookup.find(edge_key(v0, v1, n_vertices));
  return it == edge_lookup.end() ? -1 : it->second;
}

P2DofMap build_p2_dofmap(const TriMesh& mesh) {
  P2DofMap dm;
  dm.n_vertices = mesh.num_vertices();
  dm.triangle_edges.resize(mesh.num_triangles(), 3);
  dm.inv_jacobian_t.resize(mesh.num_triangles());
  dm.edge_lookup.reserve(3 * mesh.num_triangles());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.triangles(e, k);
      const int b = mesh.triangles(e, (k + 1) % 3);
      const long long key = edge_key(a, b, dm.n_vertices);
      auto [it, inserted] = dm.edge_lookup.try_emplace(key, dm.n_edges);
      if (inserted) {
        dm.edge_vertices.push_back({std::min(a, b), std::max(a, b)});
        ++dm.n_edges;
      }
      dm.triangle_edges(e, k) = it->second;
    }
    dm.inv_jacobian_t[e] = element_inv_jacobian_t(mesh, e);
  }
  return dm;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> p2_dof_coordinates(const TriMesh& mesh,
                                                            const P2DofMap& dm) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> coords(dm.n_scalar_dofs(), 2);
  coords.topRows(dm.n_vertices) = mesh.vertices;
  for (int e = 0; e < dm.n_edges; ++e) {
    coords.row(dm.n_vertices + e) =
        0.5 * (mesh.vertices.row(dm.edge_vertices[e][0]) +
               mesh.vertices.row(dm.edge_vertices[e][1]));
  }
  return coords;
}

std::array<int, 6> element_p2_dofs(const TriMesh& mesh, const P2DofMap& dm, int e) {
  return {mesh.triangles(e, 0),
          mesh.triangles(e, 1),
          mesh.triangles(e, 2),
          dm.n_vertices + dm.triangle_edges(e, 0),
          dm.n_vertices + dm.triangle_edges(e, 1),
          dm.n_vertices + dm.triangle_edges(e, 2)};
}

Eigen::Matrix<double, 6, 1> p2_basis_values(const Eigen::Vector3d& bary) {
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  Eigen::Matrix<double, 6, 1> values;
  values << l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
      4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0;
  return values;
}

Eigen::Matrix<double, 6, 2> p2_basis_ref_gradients(const Eigen::Vector3d& bary) {
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  const Eigen::RowVector2d g0(-1.0, -1.0);
  const Eigen::RowVector2d g1(1.0, 0.0);
  const Eigen::RowVector2d g2(0.0, 1.0);
  Eigen::Matrix<double, 6, 2> grads;
  grads.row(0) = (4 * l0 - 1) * g0;
  grads.row(1) = (4 * l1 - 1) * g1;
  grads.row(2) = (4 * l2 - 1) * g2;
  grads.row(3) = 4 * (l1 * g0 + l0 * g1);
  grads.row(4) = 4 * (l2 * g1 + l1 * g2);
  grads.row(5) = 4 * (l0 * g2 + l2 * g0);
  return grads;
}

const TriQuadrature& tri_quadrature() {
  static const TriQuadrature quad = [] {
    TriQuadrature q;
    const double a = 0.445948490915965;
    const double b = 0.091576213509771;
    const double wa = 0.223381589678011;
    const double wb = 0.109951743655322;
    q.barycentric << 1 - 2 * a, a, a,
        a, 1 - 2 * a, a,
        a, a, 1 - 2 * a,
        1 - 2 * b, b, b,
        b, 1 - 2 * b, b,
        b, b, 1 - 2 * b;
    q.weights << wa, wa, wa, wb, wb, wb;
    for (int i = 0; i < kQuadraturePoints; ++i) {
      const Eigen::Vector3d bary = q.barycentric.row(i).transpose();
      q.p2_values.row(i) = p2_basis_values(bary).transpose();
      q.p2_ref_gradients[i] = p2_basis_ref_gradients(bary);
      q.p1_values.row(i) = bary.transpose();
    }
    return q;
  }();
  return quad;
}

namespace {

// element stiffness, mass and pressure-divergence blocks of one triangle
struct ElementMatrices {
  Eigen::Matrix<double, 6, 6> stiffness = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 6> mass = Eigen::Matrix<double, 6, 6>::Zero();
  // divergence[j](a, c) = int lambda_j d_c N_a
  std::array<Eigen::Matrix<double, 6, 2>, 3> divergence{
      Eigen::Matrix<double, 6, 2>::Zero(), Eigen::Matrix<double, 6, 2>::Zero(),
      Eigen::Matrix<double, 6, 2>::Zero()};
};

ElementMatrices element_matrices(const TriMesh& mesh, const P2DofMap& dm, int e) {
  const TriQuadrature& quad = tri_quadrature();
  const Eigen::Matrix2d& invjt = dm.inv_jacobian_t[e];
  const double area = mesh.element_areas[e];
  ElementMatrices out;
  for (int qp = 0; qp < kQuadraturePoints; ++qp) {
    const double w = quad.weights[qp] * area;
    const Eigen::Matrix<double, 6, 2> grads = quad.p2_ref_gradients[qp] * invjt.transpose();
    out.stiffness += w * grads * grads.transpose();
    out.mass += w * quad.p2_values.row(qp).transpose() * quad.p2_values.row(qp);
    for (int j = 0; j < 3; ++j) {
      out.divergence[j] += (w * quad.p1_values(qp, j)) * grads;
    }
  }
  return out;
}

void check_alpha(const ElementwiseField& alpha, const TriMesh& mesh) {
  if (alpha.values.size() != mesh.num_triangles()) {
    throw std::invalid_argument("alpha: one value per triangle required");
  }
  for (Eigen::Index e = 0; e < alpha.values.size(); ++e) {
    if (!(alpha.values[e] >= 0.0)) {
      throw std::invalid_argument("alpha: negative or NaN value at element " +
                                  std::to_string(e));
    }
  }
}

}  // namespace

DirichletValues interpolate_boundary_velocity(const TriMesh& mesh, const P2DofMap& dm,
                                              const BoundaryVelocityFn& data) {
  const auto coords = p2_dof_coordinates(mesh, dm);
  DirichletValues values;
  values.ux = Eigen::VectorXd::Zero(dm.n_scalar_dofs());
  values.uy = Eigen::VectorXd::Zero(dm.n_scalar_dofs());
  std::vector<char> seen(dm.n_scalar_dofs(), 0);
  for (const auto& edge : mesh.boundary_edges) {
    const int mid = dm.edge_index(edge.v0, edge.v1);
    if (mid < 0) {
      throw std::logic_error("boundary edge missing from dof map");
    }
    for (const int dof : {edge.v0, edge.v1, dm.n_vertices + mid}) {
      if (!seen[dof]) {
        seen[dof] = 1;
        values.dofs.push_back(dof);
        const Eigen::Vector2d value = data(coords.row(dof).transpose());
        values.ux[dof] = value.x();
        values.uy[dof] = value.y();
      }
    }
  }
  return values;
}

StokesOperator assemble_stokes_brinkman_operator(const TriMesh& mesh,
                                                 const P2DofMap& dm,
                                                 const ElementwiseField& alpha) {
  check_alpha(alpha, mesh);
  if (mesh.boundary_edges.empty()) {
    throw std::invalid_argument("assemble_stokes_brinkman: mesh has no boundary edges");
  }

  StokesOperator op;
  op.n_scalar = dm.n_scalar_dofs();
  op.n_pressure = dm.n_vertices;

  // boundary scalar dofs, in first-seen order along the boundary edge list
  std::vector<char> on_boundary(op.n_scalar, 0);
  for (const auto& edge : mesh.boundary_edges) {
    for (const int dof :
         {edge.v0, edge.v1, dm.n_vertices + dm.edge_index(edge.v0, edge.v1)}) {
      if (!on_boundary[dof]) {
        on_boundary[dof] = 1;
        op.dirichlet_dofs.push_back(dof);
      }
    }
  }
  std::vector<char> dirichlet_row(op.dim(), 0);
  for (const int dof : op.dirichlet_dofs) {
    dirichlet_row[op.ux_index(dof)] = 1;
    dirichlet_row[op.uy_index(dof)] = 1;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.num_triangles()) * 160 + op.dim());
  const auto add = [&](int row, int col, double value) {
    if (!dirichlet_row[row]) triplets.emplace_back(row, col, value);
  };

  const int mult = op.dim() - 1;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const ElementMatrices em = element_matrices(mesh, dm, e);
    const Eigen::Matrix<double, 6, 6> velocity_block =
        em.stiffness + alpha.values[e] * em.mass;
    const auto dofs = element_p2_dofs(mesh, dm, e);
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        add(op.ux_index(dofs[a]), op.ux_index(dofs[b]), velocity_block(a, b));
        add(op.uy_index(dofs[a]), op.uy_index(dofs[b]), velocity_block(a, b));
      }
    }
    for (int j = 0; j < 3; ++j) {
      const int prow = op.pressure_index(mesh.triangles(e, j));
      for (int a = 0; a < 6; ++a) {
        // b(w, p) = -int p div(w), and its transpose for the continuity rows
        add(op.ux_index(dofs[a]), prow, -em.divergence[j](a, 0));
        add(op.uy_index(dofs[a]), prow, -em.divergence[j](a, 1));
        add(prow, op.ux_index(dofs[a]), -em.divergence[j](a, 0));
        add(prow, op.uy_index(dofs[a]), -em.divergence[j](a, 1));
      }
      // mean-zero pressure multiplier: int_D p dx = 0
      const double third_area = mesh.element_areas[e] / 3.0;
      add(prow, mult, third_area);
      add(mult, prow, third_area);
    }
  }
  for (int row = 0; row < op.dim(); ++row) {
    if (dirichlet_row[row]) triplets.emplace_back(row, row, 1.0);
  }

  op.matrix.resize(op.dim(), op.dim());
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

Eigen::VectorXd stokes_dirichlet_rhs(const StokesOperator& op,
                                     const DirichletValues& values) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.dim());
  for (const int dof : values.dofs) {
    rhs[op.ux_index(dof)] = values.ux[dof];
    rhs[op.uy_index(dof)] = values.uy[dof];
  }
  return rhs;
}

Eigen::VectorXd stokes_load_rhs(const StokesOperator& op, const SparseMatrix& mass,
                                const VectorFieldP2& load, double scale) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.dim());
  rhs.head(op.n_scalar) = scale * (mass * load.x_component.coeffs);
  rhs.segment(op.n_scalar, op.n_scalar) = scale * (mass * load.y_component.coeffs);
  for (const int dof : op.dirichlet_dofs) {
    rhs[op.ux_index(dof)] = 0.0;
    rhs[op.uy_index(dof)] = 0.0;
  }
  return rhs;
}

StokesSystem assemble_stokes_brinkman(const TriMesh& mesh, const ElementwiseField& alpha,
                                      const BoundaryVelocityFn& dirichlet) {
  StokesSystem sys;
  sys.dofmap = build_p2_dofmap(mesh);
  sys.op = assemble_stokes_brinkman_operator(mesh, sys.dofmap, alpha);
  sys.rhs = stokes_dirichlet_rhs(
      sys.op, interpolate_boundary_velocity(mesh, sys.dofmap, dirichlet));
  return sys;
}

SparseMatrix assemble_smoothing_operator(const TriMesh& mesh, const P2DofMap& dm,
                                         double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("assemble_smoothing_operator: dt must be positive");
  }
  return SparseMatrix(p2_mass_matrix(mesh, dm) / dt) + p2_stiffness_matrix(mesh, dm);
}

namespace {

template <typename ElementBlock>
SparseMatrix assemble_p2_scalar(const TriMesh& mesh, const P2DofMap& dm,
                                ElementBlock&& block) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.num_triangles()) * 36);
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const Eigen::Matrix<double, 6, 6> local = block(e);
    const auto dofs = element_p2_dofs(mesh, dm, e);
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        triplets.emplace_back(dofs[a], dofs[b], local(a, b));
      }
    }
  }
  SparseMatrix matrix(dm.n_scalar_dofs(), dm.n_scalar_dofs());
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  matrix.makeCompressed();
  return matrix;
}

}  // namespace

SparseMatrix p2_mass_matrix(const TriMesh& mesh, const P2DofMap& dm) {
  return assemble_p2_scalar(mesh, dm,
                            [&](int e) { return element_matrices(mesh, dm, e).mass; });
}

SparseMatrix p2_stiffness_matrix(const TriMesh& mesh, const P2DofMap& dm) {
  return assemble_p2_scalar(
      mesh, dm, [&](int e) { return element_matrices(mesh, dm, e).stiffness; });
}

SparseMatrix p1_mass_matrix(const TriMesh& mesh) {
  Eigen::Matrix3d local;
  local << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.num_triangles()) * 9);
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const double factor = mesh.element_areas[e] / 12.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        triplets.emplace_back(mesh.triangles(e, a), mesh.triangles(e, b),
                              factor * local(a, b));
      }
    }
  }
  SparseMatrix matrix(mesh.num_vertices(), mesh.num_vertices());
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  matrix.makeCompressed();
  return matrix;
}

double integrate(const TriMesh& mesh,
                 const std::function<double(const Eigen::Vector2d&)>& integrand) {
  const TriQuadrature& quad = tri_quadrature();
  double total = 0.0;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const Eigen::Vector2d p0 = mesh.vertex(mesh.triangles(e, 0));
    const Eigen::Vector2d p1 = mesh.vertex(mesh.triangles(e, 1));
    const Eigen::Vector2d p2 = mesh.vertex(mesh.triangles(e, 2));
    double local = 0.0;
    for (int qp = 0; qp < kQuadraturePoints; ++qp) {
      const Eigen::Vector2d x = quad.barycentric(qp, 0) * p0 +
                                quad.barycentric(qp, 1) * p1 +
                                quad.barycentric(qp, 2) * p2;
      local += quad.weights[qp] * integrand(x);
    }
    total += mesh.element_areas[e] * local;
  }
  return total;
}

double integrate(const TriMesh& mesh, const P2DofMap& dm, const VectorFieldP2& u,
                 const std::function<double(const Eigen::Vector2d&)>& integrand) {
  const TriQuadrature& quad = tri_quadrature();
  double total = 0.0;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto dofs = element_p2_dofs(mesh, dm, e);
    Eigen::Matrix<double, 6, 1> ux, uy;
    for (int a = 0; a < 6; ++a) {
      ux[a] = u.x_component.coeffs[dofs[a]];
      uy[a] = u.y_component.coeffs[dofs[a]];
    }
    double local = 0.0;
    for (int qp = 0; qp < kQuadraturePoints; ++qp) {
      const Eigen::Vector2d value(quad.p2_values.row(qp) * ux,
                                  quad.p2_values.row(qp) * uy);
      local += quad.weights[qp] * integrand(value);
    }
    total += mesh.element_areas[e] * local;
  }
  return total;
}

Eigen::VectorXd evaluate_at_vertices(const P2DofMap& dm, const ScalarFieldP2& field) {
  if (field.coeffs.size() != dm.n_scalar_dofs()) {
    throw std::invalid_argument("evaluate_at_vertices: field size mismatch");
  }
  return field.coeffs.head(dm.n_vertices);
}

Eigen::Matrix<double, Eigen::Dynamic, 2> evaluate_at_vertices(const P2DofMap& dm,
                                                              const VectorFieldP2& field) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> values(dm.n_vertices, 2);
  values.col(0) = evaluate_at_vertices(dm, field.x_component);
  values.col(1) = evaluate_at_vertices(dm, field.y_component);
  return values;
}

double boundary_flux(const TriMesh& mesh, const P2DofMap& dm, const VectorFieldP2& u,
                     BoundaryTag tag) {
  // 3-point Gauss on the unit interval, exact for the quadratic edge trace
  static const std::array<double, 3> points = {
      0.5 - std::sqrt(0.15), 0.5, 0.5 + std::sqrt(0.15)};
  static const std::array<double, 3> weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

  double flux = 0.0;
  for (const auto& edge : mesh.boundary_edges) {
    if (edge.tag != tag) continue;
    const Eigen::Vector2d normal = boundary_normal(mesh, edge);
    const int mid = dm.n_vertices + dm.edge_index(edge.v0, edge.v1);
    const double length = (mesh.vertex(edge.v1) - mesh.vertex(edge.v0)).norm();
    const auto trace = [&](const Eigen::VectorXd& c, double s) {
      // quadratic through (0, c0), (1/2, cm), (1, c1)
      return c[edge.v0] * (1 - s) * (1 - 2 * s) + c[edge.v1] * s * (2 * s - 1) +
             c[mid] * 4 * s * (1 - s);
    };
    double local = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d value(trace(u.x_component.coeffs, points[i]),
                                  trace(u.y_component.coeffs, points[i]));
      local += weights[i] * value.dot(normal);
    }
    flux += length * local;
  }
  return flux;
}

}  // namespace topoflow
