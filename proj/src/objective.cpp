#include "topoflow/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topoflow {

namespace {

void check_characteristic(const TriMesh& mesh, const ElementwiseField& chi,
                          const char* who) {
  if (chi.values.size() != mesh.num_triangles()) {
    throw std::invalid_argument(std::string(who) +
                                ": characteristic function size does not match mesh");
  }
  for (Eigen::Index e = 0; e < chi.values.size(); ++e) {
    if (chi.values[e] != 0.0 && chi.values[e] != 1.0) {
      throw std::invalid_argument(std::string(who) +
                                  ": characteristic values must be exactly 0 or 1");
    }
  }
}

}  // namespace

double evaluate_objective(const TriMesh& mesh, const P2DofMap& dm,
                          const VectorFieldP2& u_s, double u_t) {
  if (!(u_t > 0.0)) {
    throw std::invalid_argument("evaluate_objective: u_t must be positive");
  }
  return integrate(mesh, dm, u_s, [u_t](const Eigen::Vector2d& value) {
    const double deficit = std::min(0.0, value.norm() - u_t);
    return deficit * deficit;
  });
}

double fulfillment_fraction(const TriMesh& mesh, const P2DofMap& dm,
                            const VectorFieldP2& u_s, double u_t) {
  if (!(u_t > 0.0)) {
    throw std::invalid_argument("fulfillment_fraction: u_t must be positive");
  }
  const double satisfied = integrate(mesh, dm, u_s, [u_t](const Eigen::Vector2d& value) {
    return value.norm() >= u_t ? 1.0 : 0.0;
  });
  return satisfied / mesh.total_area();
}

double shape_distance(const TriMesh& mesh, const ElementwiseField& chi1,
                      const ElementwiseField& chi2) {
  check_characteristic(mesh, chi1, "shape_distance");
  check_characteristic(mesh, chi2, "shape_distance");
  const Eigen::ArrayXd diff = chi1.values.array() - chi2.values.array();
  return std::sqrt((diff.square() * mesh.element_areas.array()).sum());
}

double penalty(double r, const PenaltyParams& params) {
  if (!(r >= 0.0)) {
    throw std::invalid_argument("penalty: distance must be non-negative");
  }
  const double floored = std::max(r, params.r_min);
  // gamma^2/r - r written as (gamma - r)(gamma + r)/r so r = gamma lands on
  // an exact zero exponent
  const double exponent = std::clamp(
      params.delta * (params.gamma - floored) * (params.gamma + floored) / floored,
      params.exponent_min, params.exponent_max);
  return std::exp(exponent);
}

double total_penalty(const TriMesh& mesh, const ElementwiseField& chi,
                     const ShapeArchive& archive, const PenaltyParams& params) {
  double total = 0.0;
  for (const auto& entry : archive.entries) {
    total += penalty(shape_distance(mesh, chi, entry.chi), params);
  }
  return total;
}

}  // namespace topoflow
