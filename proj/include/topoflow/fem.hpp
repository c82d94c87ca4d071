#pragma once

#include "topoflow/linalg.hpp"
#include "topoflow/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <unordered_map>
#include <vector>

namespace topoflow {

// Nodal fields. P1 lives on vertices, P2 on vertices followed by edge
// midpoints; the quadratic Lagrange basis is interpolatory at both.
struct ScalarFieldP1 {
  Eigen::VectorXd coeffs;
};

struct ScalarFieldP2 {
  Eigen::VectorXd coeffs;
};

struct VectorFieldP2 {
  ScalarFieldP2 x_component;
  ScalarFieldP2 y_component;
};

// One value per triangle (inverse permeability, characteristic functions).
struct ElementwiseField {
  Eigen::VectorXd values;
};

// Scalar P2 numbering plus per-element geometry for one mesh. Immutable
// after construction; shared by all assemblies on that mesh.
struct P2DofMap {
  int n_vertices = 0;
  int n_edges = 0;
  // local edge k of a triangle connects local vertices (k, (k+1)%3)
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangle_edges;
  std::vector<std::array<int, 2>> edge_vertices;
  std::vector<Eigen::Matrix2d> inv_jacobian_t;  // reference->physical gradient map
  std::unordered_map<long long, int> edge_lookup;

  int n_scalar_dofs() const { return n_vertices + n_edges; }
  // global edge index for a vertex pair, -1 when the pair is not an edge
  int edge_index(int v0, int v1) const;
};

P2DofMap build_p2_dofmap(const TriMesh& mesh);

// coordinates of every scalar P2 dof: vertex positions, then edge midpoints
Eigen::Matrix<double, Eigen::Dynamic, 2> p2_dof_coordinates(const TriMesh& mesh,
                                                            const P2DofMap& dofmap);

// global scalar dofs of one element: three vertices, then three edges
std::array<int, 6> element_p2_dofs(const TriMesh& mesh, const P2DofMap& dofmap,
                                   int element);

// 6-point degree-4 triangle rule; weights are normalized to sum to one, so
// an element integral is area * sum_q w_q f(x_q).
inline constexpr int kQuadraturePoints = 6;

struct TriQuadrature {
  Eigen::Matrix<double, kQuadraturePoints, 3> barycentric;
  Eigen::Matrix<double, kQuadraturePoints, 1> weights;
  Eigen::Matrix<double, kQuadraturePoints, 6> p2_values;
  std::array<Eigen::Matrix<double, 6, 2>, kQuadraturePoints> p2_ref_gradients;
  Eigen::Matrix<double, kQuadraturePoints, 3> p1_values;
};

const TriQuadrature& tri_quadrature();

Eigen::Matrix<double, 6, 1> p2_basis_values(const Eigen::Vector3d& bary);
Eigen::Matrix<double, 6, 2> p2_basis_ref_gradients(const Eigen::Vector3d& bary);

// Prescribed boundary velocity, stored as full-length per-component value
// vectors; only the listed dofs are constrained.
struct DirichletValues {
  std::vector<int> dofs;
  Eigen::VectorXd ux;
  Eigen::VectorXd uy;
};

using BoundaryVelocityFn = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

// pointwise interpolation of boundary data at every boundary velocity dof
DirichletValues interpolate_boundary_velocity(const TriMesh& mesh,
                                              const P2DofMap& dofmap,
                                              const BoundaryVelocityFn& data);

// Saddle-point operator of the flow problem. Unknowns are ordered
// [ux | uy | p | mean-pressure multiplier]; velocity rows on the boundary
// are replaced by identity rows, everything else is the symmetric weak form.
struct StokesOperator {
  SparseMatrix matrix;
  std::vector<int> dirichlet_dofs;  // boundary scalar dofs (per component)
  int n_scalar = 0;
  int n_pressure = 0;

  int dim() const { return 2 * n_scalar + n_pressure + 1; }
  int ux_index(int dof) const { return dof; }
  int uy_index(int dof) const { return n_scalar + dof; }
  int pressure_index(int vertex) const { return 2 * n_scalar + vertex; }
};

// Weak form of -laplace(u) + alpha u + grad(p) = 0, div(u) = 0 with
// elementwise-constant alpha >= 0 and int_D p dx = 0 enforced through one
// scalar Lagrange multiplier. Requires all three boundary tags present.
StokesOperator assemble_stokes_brinkman_operator(const TriMesh& mesh,
                                                 const P2DofMap& dofmap,
                                                 const ElementwiseField& alpha);

// rhs with prescribed boundary values on the Dirichlet rows
Eigen::VectorXd stokes_dirichlet_rhs(const StokesOperator& op,
                                     const DirichletValues& values);
// rhs contribution scale * (load, w) on interior velocity rows; mass is the
// scalar P2 mass matrix of the same mesh
Eigen::VectorXd stokes_load_rhs(const StokesOperator& op, const SparseMatrix& mass,
                                const VectorFieldP2& load, double scale);

// one-call form: operator, rhs and the dof map it was built with
struct StokesSystem {
  StokesOperator op;
  Eigen::VectorXd rhs;
  P2DofMap dofmap;
};

StokesSystem assemble_stokes_brinkman(const TriMesh& mesh, const ElementwiseField& alpha,
                                      const BoundaryVelocityFn& dirichlet);

// (1/dt) M + K on the quadratic scalar space; natural boundary conditions
SparseMatrix assemble_smoothing_operator(const TriMesh& mesh, const P2DofMap& dofmap,
                                         double dt);

SparseMatrix p2_mass_matrix(const TriMesh& mesh, const P2DofMap& dofmap);
SparseMatrix p2_stiffness_matrix(const TriMesh& mesh, const P2DofMap& dofmap);
SparseMatrix p1_mass_matrix(const TriMesh& mesh);

// quadrature integral of a position-dependent integrand over the mesh
double integrate(const TriMesh& mesh,
                 const std::function<double(const Eigen::Vector2d&)>& integrand);
// quadrature integral of f(u(x)) for a quadratic vector field
double integrate(const TriMesh& mesh, const P2DofMap& dofmap, const VectorFieldP2& u,
                 const std::function<double(const Eigen::Vector2d&)>& integrand);

// vertex values of a quadratic field (the basis is interpolatory there)
Eigen::VectorXd evaluate_at_vertices(const P2DofMap& dofmap, const ScalarFieldP2& field);
Eigen::Matrix<double, Eigen::Dynamic, 2> evaluate_at_vertices(const P2DofMap& dofmap,
                                                              const VectorFieldP2& field);

// int_{Gamma_tag} u . n ds over the tagged boundary edges
double boundary_flux(const TriMesh& mesh, const P2DofMap& dofmap,
                     const VectorFieldP2& u, BoundaryTag tag);

}  // namespace topoflow
