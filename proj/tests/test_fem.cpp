#include <doctest.h>

#include "topoflow/fem.hpp"
#include "topoflow/physics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace topoflow;

namespace {

const WarnFn quiet = [](const std::string&) {};

ElementwiseField constant_alpha(const TriMesh& mesh, double value) {
  return {Eigen::VectorXd::Constant(mesh.num_triangles(), value)};
}

// independent integral of each P2 basis function, one element at a time
Eigen::VectorXd basis_integrals(const TriMesh& mesh, const P2DofMap& dm) {
  const TriQuadrature& quad = tri_quadrature();
  Eigen::VectorXd integrals = Eigen::VectorXd::Zero(dm.n_scalar_dofs());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto dofs = element_p2_dofs(mesh, dm, e);
    for (int qp = 0; qp < kQuadraturePoints; ++qp) {
      for (int a = 0; a < 6; ++a) {
        integrals[dofs[a]] +=
            quad.weights[qp] * mesh.element_areas[e] * quad.p2_values(qp, a);
      }
    }
  }
  return integrals;
}

}  // namespace

TEST_CASE("saddle system size on the n=2 mesh") {
  const TriMesh mesh = build_unit_square_mesh(2, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  CHECK(dm.n_vertices == 9);
  CHECK(dm.n_edges == 16);
  CHECK(dm.n_scalar_dofs() == 25);
  const StokesOperator op =
      assemble_stokes_brinkman_operator(mesh, dm, constant_alpha(mesh, 1.0));
  CHECK(op.matrix.rows() == 2 * 25 + 9 + 1);
  CHECK(op.matrix.rows() == op.matrix.cols());
}

TEST_CASE("P2 mass matrix row sums match basis integrals and total one") {
  const TriMesh mesh = build_unit_square_mesh(5, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  const SparseMatrix mass = p2_mass_matrix(mesh, dm);
  const Eigen::VectorXd row_sums = mass * Eigen::VectorXd::Ones(dm.n_scalar_dofs());
  const Eigen::VectorXd expected = basis_integrals(mesh, dm);
  CHECK((row_sums - expected).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(std::abs(row_sums.sum() - 1.0) < 1e-12);
}

TEST_CASE("stiffness annihilates constants") {
  const TriMesh mesh = build_unit_square_mesh(4, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  const SparseMatrix stiffness = p2_stiffness_matrix(mesh, dm);
  const Eigen::VectorXd result = stiffness * Eigen::VectorXd::Ones(dm.n_scalar_dofs());
  CHECK(result.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("smoothing operator") {
  const TriMesh mesh = build_unit_square_mesh(4, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  const double dt = 1e-3;
  const SparseMatrix op = assemble_smoothing_operator(mesh, dm, dt);
  const SparseMatrix mass = p2_mass_matrix(mesh, dm);

  SUBCASE("constants see only the mass term") {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dm.n_scalar_dofs());
    CHECK(((op * ones) - (mass * ones) / dt).lpNorm<Eigen::Infinity>() < 1e-9);
  }

  SUBCASE("symmetric positive definite") {
    const Eigen::MatrixXd dense(op);
    CHECK((dense - dense.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }

  SUBCASE("smallest generalized eigenvalue equals 1/dt") {
    const Eigen::MatrixXd dense_op(op);
    const Eigen::MatrixXd dense_mass(mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense_op, dense_mass);
    CHECK(eig.eigenvalues()(0) ==
          doctest::Approx(1.0 / dt).epsilon(1e-6));
  }

  SUBCASE("non-positive dt rejected") {
    CHECK_THROWS_AS(assemble_smoothing_operator(mesh, dm, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_smoothing_operator(mesh, dm, -1.0), std::invalid_argument);
  }
}

TEST_CASE("negative alpha rejected") {
  const TriMesh mesh = build_unit_square_mesh(3, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  CHECK_THROWS_AS(assemble_stokes_brinkman_operator(mesh, dm, constant_alpha(mesh, -1.0)),
                  std::invalid_argument);
}

TEST_CASE("zero boundary data gives the zero solution") {
  const TriMesh mesh = build_unit_square_mesh(4, quiet);
  const StokesSystem sys = assemble_stokes_brinkman(
      mesh, constant_alpha(mesh, 1.0),
      [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero(); });
  const Eigen::VectorXd x = solve(sys.op.matrix, sys.rhs);
  CHECK(x.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("saddle matrix is symmetric apart from Dirichlet rows") {
  const TriMesh mesh = build_unit_square_mesh(3, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  const StokesOperator op =
      assemble_stokes_brinkman_operator(mesh, dm, constant_alpha(mesh, 2.0));
  std::vector<char> dirichlet(op.dim(), 0);
  for (const int dof : op.dirichlet_dofs) {
    dirichlet[op.ux_index(dof)] = 1;
    dirichlet[op.uy_index(dof)] = 1;
  }
  const Eigen::MatrixXd dense(op.matrix);
  double max_asymmetry = 0.0;
  for (int i = 0; i < op.dim(); ++i) {
    if (dirichlet[i]) continue;
    for (int j = 0; j < op.dim(); ++j) {
      if (dirichlet[j]) continue;
      max_asymmetry = std::max(max_asymmetry, std::abs(dense(i, j) - dense(j, i)));
    }
  }
  CHECK(max_asymmetry < 1e-12);
}

TEST_CASE("patch test: quadratic velocity / linear pressure is exact") {
  // u = (y^2, x^2), p = 2x + 2y - 2 solves the alpha = 0 problem exactly
  const TriMesh mesh = build_unit_square_mesh(8, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  const StokesOperator op =
      assemble_stokes_brinkman_operator(mesh, dm, constant_alpha(mesh, 0.0));
  const DirichletValues bc = interpolate_boundary_velocity(
      mesh, dm, [](const Eigen::Vector2d& x) {
        return Eigen::Vector2d(x.y() * x.y(), x.x() * x.x());
      });
  const Eigen::VectorXd sol = solve(op.matrix, stokes_dirichlet_rhs(op, bc));

  const auto coords = p2_dof_coordinates(mesh, dm);
  Eigen::VectorXd err_x(dm.n_scalar_dofs()), err_y(dm.n_scalar_dofs());
  for (int d = 0; d < dm.n_scalar_dofs(); ++d) {
    err_x[d] = sol[op.ux_index(d)] - coords(d, 1) * coords(d, 1);
    err_y[d] = sol[op.uy_index(d)] - coords(d, 0) * coords(d, 0);
  }
  const SparseMatrix mass2 = p2_mass_matrix(mesh, dm);
  const double u_err =
      std::sqrt(err_x.dot(mass2 * err_x) + err_y.dot(mass2 * err_y));
  CHECK(u_err < 1e-10);

  Eigen::VectorXd err_p(dm.n_vertices);
  for (int v = 0; v < dm.n_vertices; ++v) {
    err_p[v] = sol[op.pressure_index(v)] -
               (2.0 * mesh.vertices(v, 0) + 2.0 * mesh.vertices(v, 1) - 2.0);
  }
  const SparseMatrix mass1 = p1_mass_matrix(mesh);
  CHECK(std::sqrt(err_p.dot(mass1 * err_p)) < 1e-8);
}

TEST_CASE("integrate position integrands") {
  const TriMesh mesh = build_unit_square_mesh(20);
  CHECK(integrate(mesh, [](const Eigen::Vector2d&) { return 1.0; }) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(integrate(mesh, [](const Eigen::Vector2d& x) { return x.x(); }) ==
        doctest::Approx(0.5).epsilon(1e-13));
  // squared inflow parabola, extended by zero: exact value
  // (400/9)^2 * 0.3^5 / 30 = 0.16 once the strip ends align with the grid
  const double value = integrate(mesh, [](const Eigen::Vector2d& x) {
    const double p = inflow_profile(x.y());
    return p * p;
  });
  CHECK(value == doctest::Approx(0.16).epsilon(1e-13));
}

TEST_CASE("evaluate_at_vertices") {
  const TriMesh mesh = build_unit_square_mesh(2, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);

  SUBCASE("constant field") {
    const ScalarFieldP2 c{Eigen::VectorXd::Constant(dm.n_scalar_dofs(), 3.25)};
    const Eigen::VectorXd values = evaluate_at_vertices(dm, c);
    CHECK(values.size() == dm.n_vertices);
    CHECK((values.array() == 3.25).all());
  }

  SUBCASE("interpolant of x^2") {
    const auto coords = p2_dof_coordinates(mesh, dm);
    ScalarFieldP2 field{coords.col(0).array().square().matrix()};
    const Eigen::VectorXd values = evaluate_at_vertices(dm, field);
    for (int v = 0; v < dm.n_vertices; ++v) {
      CHECK(values[v] == mesh.vertices(v, 0) * mesh.vertices(v, 0));
    }
  }

  SUBCASE("random coefficients against direct basis evaluation") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    ScalarFieldP2 field{Eigen::VectorXd::Zero(dm.n_scalar_dofs())};
    for (int d = 0; d < dm.n_scalar_dofs(); ++d) field.coeffs[d] = dist(rng);
    const Eigen::VectorXd values = evaluate_at_vertices(dm, field);

    // evaluate the basis expansion at each vertex of each element
    const Eigen::Matrix3d vertex_bary = Eigen::Matrix3d::Identity();
    for (int e = 0; e < mesh.num_triangles(); ++e) {
      const auto dofs = element_p2_dofs(mesh, dm, e);
      for (int k = 0; k < 3; ++k) {
        const auto basis = p2_basis_values(vertex_bary.col(k));
        double sum = 0.0;
        for (int a = 0; a < 6; ++a) sum += field.coeffs[dofs[a]] * basis[a];
        CHECK(sum == doctest::Approx(values[mesh.triangles(e, k)]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("boundary flux of a constant field") {
  const TriMesh mesh = build_unit_square_mesh(20);
  const P2DofMap dm = build_p2_dofmap(mesh);
  VectorFieldP2 u{{Eigen::VectorXd::Ones(dm.n_scalar_dofs())},
                  {Eigen::VectorXd::Zero(dm.n_scalar_dofs())}};
  CHECK(boundary_flux(mesh, dm, u, BoundaryTag::Inlet) ==
        doctest::Approx(-0.3).epsilon(1e-13));
  CHECK(boundary_flux(mesh, dm, u, BoundaryTag::Outlet) ==
        doctest::Approx(0.3).epsilon(1e-13));
}
