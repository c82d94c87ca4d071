#pragma once

#include "topoflow/fem.hpp"
#include "topoflow/linalg.hpp"
#include "topoflow/mesh.hpp"

#include <memory>

namespace topoflow {

class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scalar model parameters of the flow/objective pipeline.
struct ModelParams {
  double alpha_lower = 2.5 / (100.0 * 100.0);        // inverse permeability, fluid
  double alpha_upper = 2.5 / (0.0025 * 0.0025);      // inverse permeability, solid
  double target_speed = 0.1;                         // u_t
  double smoothing_dt = 1e-3;                        // implicit Euler step
};

// regularization of the direction u_s/||u_s|| in the adjoint source
inline constexpr double kNormRegularization = 1e-12;
// net inlet/outlet flux imbalance treated as an internal-consistency failure
inline constexpr double kMassBalanceTol = 1e-8;

// Parabolic inflow speed, 1 at mid-height, 0 outside [0.35, 0.65].
double inflow_profile(double y);

struct FlowState {
  VectorFieldP2 u;
  ScalarFieldP1 p;
};

struct FlowSolution {
  FlowState state;
  // factorization of the saddle operator; the adjoint flow problem shares it
  std::shared_ptr<const LuFactorization> factorization;
  double inlet_flux = 0.0;
  double outlet_flux = 0.0;
};

// Boundary data for the device problem: the inflow parabola on the inlet,
// the identical profile on the outlet, no slip elsewhere. Values are taken
// pointwise at dof coordinates; on edges straddling the strip ends the
// midpoint value is adjusted so each edge carries the exact profile flux.
DirichletValues inflow_dirichlet_values(const TriMesh& mesh, const P2DofMap& dofmap,
                                        double scale = 1.0);

// Stokes-Brinkman state solve with the device inflow/outflow profiles.
// Requires strictly positive alpha. Checks inlet/outlet mass balance.
FlowSolution solve_flow(const TriMesh& mesh, const P2DofMap& dofmap,
                        const ElementwiseField& alpha, double inflow_scale = 1.0);

// Same solve with caller-provided boundary velocity (verification problems);
// alpha >= 0 is allowed here.
FlowSolution solve_flow_with_data(const TriMesh& mesh, const P2DofMap& dofmap,
                                  const ElementwiseField& alpha,
                                  const BoundaryVelocityFn& data);

// One-step implicit Euler smoothing (1/dt) u_s - laplace(u_s) = (1/dt) u with
// natural boundary conditions. The operator is constant per (mesh, dt), so the
// factorization is computed once and reused for every solve.
class SmoothingSolver {
 public:
  SmoothingSolver(const TriMesh& mesh, const P2DofMap& dofmap, double dt);

  ScalarFieldP2 smooth(const ScalarFieldP2& u) const;
  VectorFieldP2 smooth(const VectorFieldP2& u) const;

  // adjoint smoothing: (1/dt) v_s - laplace(v_s) = 2 (u_s/||u_s||) min(0, ||u_s|| - u_t)
  VectorFieldP2 solve_adjoint(const TriMesh& mesh, const P2DofMap& dofmap,
                              const VectorFieldP2& u_s, double u_t) const;

  double dt() const { return dt_; }
  const SparseMatrix& mass() const { return mass_; }

 private:
  double dt_;
  SparseMatrix mass_;
  LuFactorization factorization_;
};

VectorFieldP2 solve_smoothing(const TriMesh& mesh, const P2DofMap& dofmap,
                              const VectorFieldP2& u, double dt);
VectorFieldP2 solve_adjoint_smoothing(const TriMesh& mesh, const P2DofMap& dofmap,
                                      const VectorFieldP2& u_s, double u_t, double dt);

struct FlowAdjoint {
  VectorFieldP2 v;
  ScalarFieldP1 q;
};

// Adjoint flow solve -laplace(v) + alpha v + grad(q) = -(1/dt) v_s with v = 0
// on the whole boundary and mean-zero q. The operator equals the state
// operator, so a state factorization can be reused.
FlowAdjoint solve_adjoint_flow(const TriMesh& mesh, const P2DofMap& dofmap,
                               const ElementwiseField& alpha, const VectorFieldP2& v_s,
                               double dt, const LuFactorization* reuse = nullptr);

}  // namespace topoflow
