#include "topoflow/topderiv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topoflow {

PenaltyTdVariant penalty_td_variant_from_string(const std::string& name) {
  if (name == "paper") return PenaltyTdVariant::paper;
  if (name == "derived") return PenaltyTdVariant::derived;
  throw std::invalid_argument("penalty_td_variant: expected 'paper' or 'derived', got '" +
                              name + "'");
}

std::string to_string(PenaltyTdVariant variant) {
  return variant == PenaltyTdVariant::paper ? "paper" : "derived";
}

TDField generalized_td_flow(const P2DofMap& dm, const VectorFieldP2& u,
                            const VectorFieldP2& v, double alpha_lower,
                            double alpha_upper) {
  const Eigen::VectorXd ux = evaluate_at_vertices(dm, u.x_component);
  const Eigen::VectorXd uy = evaluate_at_vertices(dm, u.y_component);
  const Eigen::VectorXd vx = evaluate_at_vertices(dm, v.x_component);
  const Eigen::VectorXd vy = evaluate_at_vertices(dm, v.y_component);
  TDField out;
  out.g.coeffs =
      -(alpha_upper - alpha_lower) * (ux.cwiseProduct(vx) + uy.cwiseProduct(vy));
  return out;
}

TDField generalized_td_penalty(const TriMesh& mesh, const ElementwiseField& chi,
                               const ShapeArchive& archive, const PenaltyParams& params,
                               PenaltyTdVariant variant) {
  TDField out;
  out.g.coeffs = Eigen::VectorXd::Zero(mesh.num_vertices());
  if (archive.empty()) return out;

  Eigen::VectorXd element_values = Eigen::VectorXd::Zero(mesh.num_triangles());
  for (const auto& entry : archive.entries) {
    const double r = std::max(shape_distance(mesh, chi, entry.chi), params.r_min);
    // same factored exponent as penalty() so value and derivative agree
    const double exponent =
        std::clamp(params.delta * (params.gamma - r) * (params.gamma + r) / r,
                   params.exponent_min, params.exponent_max);
    const double magnitude =
        params.delta *
        (params.gamma * params.gamma / (2.0 * r * r * r) + 1.0 / (2.0 * r)) *
        std::exp(exponent);
    const Eigen::VectorXd& reference =
        variant == PenaltyTdVariant::paper ? chi.values : entry.chi.values;
    element_values -= magnitude * (1.0 - 2.0 * reference.array()).matrix();
  }

  // area-weighted projection of the elementwise values onto vertices
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(mesh.num_vertices());
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles(e, k);
      weighted[v] += mesh.element_areas[e] * element_values[e];
      weights[v] += mesh.element_areas[e];
    }
  }
  out.g.coeffs = weighted.cwiseQuotient(weights);
  return out;
}

TDField total_generalized_td(const TDField& flow_td, const TDField& penalty_td) {
  if (flow_td.g.coeffs.size() != penalty_td.g.coeffs.size()) {
    throw std::invalid_argument("total_generalized_td: field sizes differ");
  }
  return {{flow_td.g.coeffs + penalty_td.g.coeffs}};
}

double element_velocity_adjoint_product(const TriMesh& mesh, const P2DofMap& dm,
                                        const VectorFieldP2& u, const VectorFieldP2& v,
                                        int element) {
  const TriQuadrature& quad = tri_quadrature();
  const auto dofs = element_p2_dofs(mesh, dm, element);
  Eigen::Matrix<double, 6, 1> ux, uy, vx, vy;
  for (int a = 0; a < 6; ++a) {
    ux[a] = u.x_component.coeffs[dofs[a]];
    uy[a] = u.y_component.coeffs[dofs[a]];
    vx[a] = v.x_component.coeffs[dofs[a]];
    vy[a] = v.y_component.coeffs[dofs[a]];
  }
  double value = 0.0;
  for (int qp = 0; qp < kQuadraturePoints; ++qp) {
    const Eigen::Matrix<double, 6, 1> basis = quad.p2_values.row(qp).transpose();
    value += quad.weights[qp] *
             (basis.dot(ux) * basis.dot(vx) + basis.dot(uy) * basis.dot(vy));
  }
  return mesh.element_areas[element] * value;
}

}  // namespace topoflow
