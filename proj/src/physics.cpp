#include "topoflow/physics.hpp"

#include <algorithm>
#include <cmath>

namespace topoflow {

namespace {

constexpr double kGeomTol = 1e-12;

bool on_vertical_side(double x) {
  return std::abs(x) < kGeomTol || std::abs(x - 1.0) < kGeomTol;
}

double profile_antiderivative(double y) {
  const double a = kInletYMin, b = kInletYMax;
  return (400.0 / 9.0) * (-y * y * y / 3.0 + (a + b) * y * y / 2.0 - a * b * y);
}

// integral of the clamped profile over [lo, hi]
double profile_integral(double lo, double hi) {
  lo = std::clamp(lo, kInletYMin, kInletYMax);
  hi = std::clamp(hi, kInletYMin, kInletYMax);
  if (hi <= lo) return 0.0;
  return profile_antiderivative(hi) - profile_antiderivative(lo);
}

std::vector<int> boundary_scalar_dofs(const TriMesh& mesh, const P2DofMap& dm) {
  std::vector<int> dofs;
  std::vector<char> seen(dm.n_scalar_dofs(), 0);
  for (const auto& edge : mesh.boundary_edges) {
    for (const int dof :
         {edge.v0, edge.v1, dm.n_vertices + dm.edge_index(edge.v0, edge.v1)}) {
      if (!seen[dof]) {
        seen[dof] = 1;
        dofs.push_back(dof);
      }
    }
  }
  return dofs;
}

FlowSolution finish_flow_solve(const TriMesh& mesh, const P2DofMap& dm,
                               const StokesOperator& op, const Eigen::VectorXd& rhs,
                               bool check_mass_balance) {
  FlowSolution out;
  out.factorization = std::make_shared<LuFactorization>(op.matrix);
  const Eigen::VectorXd sol = out.factorization->solve(rhs);
  out.state.u.x_component.coeffs = sol.head(op.n_scalar);
  out.state.u.y_component.coeffs = sol.segment(op.n_scalar, op.n_scalar);
  out.state.p.coeffs = sol.segment(2 * op.n_scalar, op.n_pressure);
  out.inlet_flux = boundary_flux(mesh, dm, out.state.u, BoundaryTag::Inlet);
  out.outlet_flux = boundary_flux(mesh, dm, out.state.u, BoundaryTag::Outlet);
  if (check_mass_balance &&
      std::abs(out.inlet_flux + out.outlet_flux) > kMassBalanceTol) {
    throw PhysicsError("solve_flow: inlet/outlet flux imbalance " +
                       std::to_string(out.inlet_flux + out.outlet_flux));
  }
  return out;
}

}  // namespace

double inflow_profile(double y) {
  if (y < kInletYMin || y > kInletYMax) return 0.0;
  return (400.0 / 9.0) * (y - kInletYMin) * (kInletYMax - y);
}

DirichletValues inflow_dirichlet_values(const TriMesh& mesh, const P2DofMap& dm,
                                        double scale) {
  DirichletValues values = interpolate_boundary_velocity(
      mesh, dm, [scale](const Eigen::Vector2d& x) -> Eigen::Vector2d {
        if (on_vertical_side(x.x())) return {scale * inflow_profile(x.y()), 0.0};
        return {0.0, 0.0};
      });

  // Edges straddling y = 0.35 or y = 0.65 cannot represent the profile kink
  // pointwise; match the edge flux instead through the midpoint value, so the
  // discrete inlet/outlet flux equals the exact profile integral.
  for (const auto& edge : mesh.boundary_edges) {
    const Eigen::Vector2d a = mesh.vertex(edge.v0);
    const Eigen::Vector2d b = mesh.vertex(edge.v1);
    if (!on_vertical_side(a.x()) || !on_vertical_side(b.x())) continue;
    const double ylo = std::min(a.y(), b.y());
    const double yhi = std::max(a.y(), b.y());
    const bool straddles = (ylo < kInletYMin && yhi > kInletYMin) ||
                           (ylo < kInletYMax && yhi > kInletYMax);
    if (!straddles) continue;
    const int mid = dm.n_vertices + dm.edge_index(edge.v0, edge.v1);
    const double length = yhi - ylo;
    const double exact = scale * profile_integral(ylo, yhi);
    // Simpson on the quadratic trace: h/6 (f0 + 4 fm + f1) = exact
    values.ux[mid] =
        (6.0 * exact / length - values.ux[edge.v0] - values.ux[edge.v1]) / 4.0;
  }
  return values;
}

FlowSolution solve_flow(const TriMesh& mesh, const P2DofMap& dm,
                        const ElementwiseField& alpha, double inflow_scale) {
  for (Eigen::Index e = 0; e < alpha.values.size(); ++e) {
    if (!(alpha.values[e] > 0.0)) {
      throw PhysicsError("solve_flow: alpha must be strictly positive (element " +
                         std::to_string(e) + ")");
    }
  }
  bool has_inlet = false, has_outlet = false, has_wall = false;
  for (const auto& edge : mesh.boundary_edges) {
    has_inlet |= edge.tag == BoundaryTag::Inlet;
    has_outlet |= edge.tag == BoundaryTag::Outlet;
    has_wall |= edge.tag == BoundaryTag::Wall;
  }
  if (!(has_inlet && has_outlet && has_wall)) {
    throw PhysicsError("solve_flow: mesh must carry inlet, outlet and wall tags");
  }
  const StokesOperator op = assemble_stokes_brinkman_operator(mesh, dm, alpha);
  const Eigen::VectorXd rhs =
      stokes_dirichlet_rhs(op, inflow_dirichlet_values(mesh, dm, inflow_scale));
  return finish_flow_solve(mesh, dm, op, rhs, /*check_mass_balance=*/true);
}

FlowSolution solve_flow_with_data(const TriMesh& mesh, const P2DofMap& dm,
                                  const ElementwiseField& alpha,
                                  const BoundaryVelocityFn& data) {
  const StokesOperator op = assemble_stokes_brinkman_operator(mesh, dm, alpha);
  const Eigen::VectorXd rhs =
      stokes_dirichlet_rhs(op, interpolate_boundary_velocity(mesh, dm, data));
  return finish_flow_solve(mesh, dm, op, rhs, /*check_mass_balance=*/false);
}

SmoothingSolver::SmoothingSolver(const TriMesh& mesh, const P2DofMap& dm, double dt)
    : dt_(dt),
      mass_(p2_mass_matrix(mesh, dm)),
      factorization_(assemble_smoothing_operator(mesh, dm, dt)) {}

ScalarFieldP2 SmoothingSolver::smooth(const ScalarFieldP2& u) const {
  return {factorization_.solve(mass_ * u.coeffs / dt_)};
}

VectorFieldP2 SmoothingSolver::smooth(const VectorFieldP2& u) const {
  return {smooth(u.x_component), smooth(u.y_component)};
}

VectorFieldP2 SmoothingSolver::solve_adjoint(const TriMesh& mesh, const P2DofMap& dm,
                                             const VectorFieldP2& u_s,
                                             double u_t) const {
  if (!(u_t > 0.0)) {
    throw PhysicsError("solve_adjoint_smoothing: u_t must be positive");
  }
  const TriQuadrature& quad = tri_quadrature();
  Eigen::VectorXd load_x = Eigen::VectorXd::Zero(dm.n_scalar_dofs());
  Eigen::VectorXd load_y = Eigen::VectorXd::Zero(dm.n_scalar_dofs());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto dofs = element_p2_dofs(mesh, dm, e);
    Eigen::Matrix<double, 6, 1> ux, uy;
    for (int a = 0; a < 6; ++a) {
      ux[a] = u_s.x_component.coeffs[dofs[a]];
      uy[a] = u_s.y_component.coeffs[dofs[a]];
    }
    for (int qp = 0; qp < kQuadraturePoints; ++qp) {
      const double vx = quad.p2_values.row(qp) * ux;
      const double vy = quad.p2_values.row(qp) * uy;
      const double speed = std::hypot(vx, vy);
      const double factor = 2.0 * std::min(0.0, speed - u_t) /
                            std::max(speed, kNormRegularization);
      if (factor == 0.0) continue;
      const double w = quad.weights[qp] * mesh.element_areas[e] * factor;
      for (int a = 0; a < 6; ++a) {
        load_x[dofs[a]] += w * vx * quad.p2_values(qp, a);
        load_y[dofs[a]] += w * vy * quad.p2_values(qp, a);
      }
    }
  }
  return {{factorization_.solve(load_x)}, {factorization_.solve(load_y)}};
}

VectorFieldP2 solve_smoothing(const TriMesh& mesh, const P2DofMap& dm,
                              const VectorFieldP2& u, double dt) {
  return SmoothingSolver(mesh, dm, dt).smooth(u);
}

VectorFieldP2 solve_adjoint_smoothing(const TriMesh& mesh, const P2DofMap& dm,
                                      const VectorFieldP2& u_s, double u_t, double dt) {
  return SmoothingSolver(mesh, dm, dt).solve_adjoint(mesh, dm, u_s, u_t);
}

FlowAdjoint solve_adjoint_flow(const TriMesh& mesh, const P2DofMap& dm,
                               const ElementwiseField& alpha, const VectorFieldP2& v_s,
                               double dt, const LuFactorization* reuse) {
  if (!(dt > 0.0)) {
    throw PhysicsError("solve_adjoint_flow: dt must be positive");
  }
  const int ns = dm.n_scalar_dofs();
  const int dim = 2 * ns + dm.n_vertices + 1;
  const SparseMatrix mass = p2_mass_matrix(mesh, dm);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  rhs.head(ns) = -(mass * v_s.x_component.coeffs) / dt;
  rhs.segment(ns, ns) = -(mass * v_s.y_component.coeffs) / dt;
  for (const int dof : boundary_scalar_dofs(mesh, dm)) {
    rhs[dof] = 0.0;
    rhs[ns + dof] = 0.0;
  }

  Eigen::VectorXd sol;
  if (reuse != nullptr) {
    if (reuse->rows() != dim) {
      throw PhysicsError("solve_adjoint_flow: reused factorization has wrong size");
    }
    sol = reuse->solve(rhs);
  } else {
    const StokesOperator op = assemble_stokes_brinkman_operator(mesh, dm, alpha);
    sol = LuFactorization(op.matrix).solve(rhs);
  }

  FlowAdjoint out;
  out.v.x_component.coeffs = sol.head(ns);
  out.v.y_component.coeffs = sol.segment(ns, ns);
  out.q.coeffs = sol.segment(2 * ns, dm.n_vertices);
  return out;
}

}  // namespace topoflow
