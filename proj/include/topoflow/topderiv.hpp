#pragma once

#include "topoflow/fem.hpp"
#include "topoflow/mesh.hpp"
#include "topoflow/objective.hpp"

namespace topoflow {

// Generalized topological derivative as a nodal field: negative where the
// element around a vertex wants to stay (or become) fluid, positive where it
// wants to be solid, matching the sign convention of the level set.
struct TDField {
  ScalarFieldP1 g;
};

// Two printed forms of the deflation-penalty derivative: `paper` carries the
// factor (1 - 2 chi) of the current shape, `derived` the factor (1 - 2 chi_j)
// of the archived shape (what the flip of ||chi - chi_j||^2 actually yields).
// Both coincide while the iterate still equals the archived shape.
enum class PenaltyTdVariant { paper, derived };

PenaltyTdVariant penalty_td_variant_from_string(const std::string& name);
std::string to_string(PenaltyTdVariant variant);

// flow term: g(z) = -(alpha_U - alpha_L) u(z) . v(z) at the vertices
TDField generalized_td_flow(const P2DofMap& dofmap, const VectorFieldP2& u,
                            const VectorFieldP2& v, double alpha_lower,
                            double alpha_upper);

// deflation-penalty term, computed per element and averaged onto vertices by
// area weighting; zero field for an empty archive
TDField generalized_td_penalty(const TriMesh& mesh, const ElementwiseField& chi,
                               const ShapeArchive& archive, const PenaltyParams& params,
                               PenaltyTdVariant variant = PenaltyTdVariant::paper);

TDField total_generalized_td(const TDField& flow_td, const TDField& penalty_td);

// exact element integral int_e u . v dx (the element-density counterpart of
// the flow term; also the reference quantity of the finite-difference check)
double element_velocity_adjoint_product(const TriMesh& mesh, const P2DofMap& dofmap,
                                        const VectorFieldP2& u, const VectorFieldP2& v,
                                        int element);

}  // namespace topoflow
