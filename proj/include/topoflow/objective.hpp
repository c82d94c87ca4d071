#pragma once

#include "topoflow/fem.hpp"
#include "topoflow/mesh.hpp"

#include <vector>

namespace topoflow {

// Deflation penalty parameters. gamma is the similarity radius (penalty is
// exactly 1 at shape distance gamma), delta the steepness. The distance floor
// and the exponent clamp make the penalty total near r = 0 without changing
// its ordering.
struct PenaltyParams {
  double gamma = 0.4;
  double delta = 50.0;
  double r_min = 1e-3;
  double exponent_min = -745.0;
  double exponent_max = 500.0;
};

struct ArchiveEntry {
  ElementwiseField chi;  // values exactly 0 or 1
  int round = 0;
  double objective = 0.0;
  double fulfillment = 0.0;
};

// Append-only list of characteristic functions of previously found
// minimizers, all living on one mesh.
struct ShapeArchive {
  std::vector<ArchiveEntry> entries;

  bool empty() const { return entries.empty(); }
  int size() const { return static_cast<int>(entries.size()); }
  void add(ArchiveEntry entry) { entries.push_back(std::move(entry)); }
};

// J = int_D min(0, ||u_s|| - u_t)^2 dx
double evaluate_objective(const TriMesh& mesh, const P2DofMap& dofmap,
                          const VectorFieldP2& u_s, double u_t);

// area fraction where ||u_s|| >= u_t, measured at the quadrature points
double fulfillment_fraction(const TriMesh& mesh, const P2DofMap& dofmap,
                            const VectorFieldP2& u_s, double u_t);

// || chi1 - chi2 ||_{L2(D)} = sqrt(area of the symmetric difference)
double shape_distance(const TriMesh& mesh, const ElementwiseField& chi1,
                      const ElementwiseField& chi2);

// exp(delta (gamma^2 / r - r)) with the distance floor and exponent clamp
double penalty(double r, const PenaltyParams& params);

// sum of penalties against every archived shape; 0 for an empty archive
double total_penalty(const TriMesh& mesh, const ElementwiseField& chi,
                     const ShapeArchive& archive, const PenaltyParams& params);

inline double deflated_objective(double objective, double penalty_value) {
  return objective + penalty_value;
}

}  // namespace topoflow
