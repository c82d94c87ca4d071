#pragma once

#include "topoflow/fem.hpp"
#include "topoflow/mesh.hpp"
#include "topoflow/objective.hpp"
#include "topoflow/physics.hpp"
#include "topoflow/topderiv.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace topoflow {

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Piecewise-linear nodal level set; the fluid region is where psi < 0.
// Kept at unit L2 norm (consistent P1 mass inner product).
struct LevelSet {
  ScalarFieldP1 psi;
};

struct OptimizerSettings {
  double eps_theta = 0.035;          // stopping angle, radians
  int max_iterations = 500;
  double kappa_initial = 1.0;
  double kappa_min = 1.0 / 1024.0;
  double volume_lower = 0.5;
  double volume_upper = 0.7;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double penalty = 0.0;
  double angle = 0.0;
  double volume = 0.0;
  double fulfillment = 0.0;
  double kappa = 0.0;  // step accepted from this iterate; 0 on the final record
};

enum class OptimizeStatus { converged, iteration_cap };

struct OptimizeResult {
  LevelSet levelset;
  ElementwiseField chi;
  FlowState flow;
  VectorFieldP2 smoothed_velocity;
  double objective = 0.0;
  double penalty_value = 0.0;
  double fulfillment = 0.0;
  double volume = 0.0;
  double final_angle = 0.0;
  OptimizeStatus status = OptimizeStatus::iteration_cap;
  std::vector<IterationRecord> history;

  int iterations() const { return static_cast<int>(history.size()); }
};

// Deflation context: archive of previously found shapes plus the penalty.
struct DeflationContext {
  const ShapeArchive* archive = nullptr;
  PenaltyParams params;
  PenaltyTdVariant variant = PenaltyTdVariant::paper;
};

using IterationSink = std::function<void(const IterationRecord&)>;

// chi_e = 1 where the vertex mean of psi over element e is negative
ElementwiseField characteristic_from_levelset(const LevelSet& psi, const TriMesh& mesh);

ElementwiseField alpha_from_levelset(const LevelSet& psi, const TriMesh& mesh,
                                     double alpha_lower, double alpha_upper);

double fluid_volume(const TriMesh& mesh, const ElementwiseField& chi);

// psi scaled to unit L2 norm; rejects the zero field
LevelSet normalize(LevelSet psi, const SparseMatrix& p1_mass);

// Shifts psi by a constant found by bisection until the fluid volume lies in
// [volume_lower, volume_upper] (targeting the violated bound to within half
// the smallest element area), then renormalizes. Unchanged when feasible.
LevelSet volume_project(const LevelSet& psi, const TriMesh& mesh,
                        const SparseMatrix& p1_mass, double volume_lower,
                        double volume_upper);

// angle between psi and the derivative field in the P1 mass inner product
double angle(const LevelSet& psi, const TDField& g, const SparseMatrix& p1_mass);

// spherical interpolation step from psi toward g/||g||, step kappa in (0, 1]
LevelSet update_levelset(const LevelSet& psi, const TDField& g, double kappa,
                         const SparseMatrix& p1_mass);

// all-fluid default start: a negative, gently curved bowl so the first volume
// projection has level sets to cut along
LevelSet default_initial_levelset(const TriMesh& mesh, const SparseMatrix& p1_mass);

OptimizeResult optimize(const TriMesh& mesh, const P2DofMap& dofmap,
                        const ModelParams& model, const OptimizerSettings& settings,
                        const DeflationContext* deflation, const LevelSet& initial,
                        const IterationSink& sink = {});

}  // namespace topoflow
