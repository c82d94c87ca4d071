#include "topoflow/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topoflow {

namespace {

double mass_inner(const SparseMatrix& mass, const Eigen::VectorXd& a,
                  const Eigen::VectorXd& b) {
  return a.dot(mass * b);
}

Eigen::VectorXd element_vertex_means(const LevelSet& psi, const TriMesh& mesh) {
  Eigen::VectorXd means(mesh.num_triangles());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    means[e] = (psi.psi.coeffs[mesh.triangles(e, 0)] +
                psi.psi.coeffs[mesh.triangles(e, 1)] +
                psi.psi.coeffs[mesh.triangles(e, 2)]) /
               3.0;
  }
  return means;
}

}  // namespace

ElementwiseField characteristic_from_levelset(const LevelSet& psi, const TriMesh& mesh) {
  if (psi.psi.coeffs.size() != mesh.num_vertices()) {
    throw OptimizerError("characteristic_from_levelset: level-set size mismatch");
  }
  ElementwiseField chi;
  chi.values = (element_vertex_means(psi, mesh).array() < 0.0).cast<double>();
  return chi;
}

ElementwiseField alpha_from_levelset(const LevelSet& psi, const TriMesh& mesh,
                                     double alpha_lower, double alpha_upper) {
  if (!(alpha_lower > 0.0) || !(alpha_upper > 0.0)) {
    throw OptimizerError("alpha_from_levelset: alpha bounds must be positive");
  }
  const ElementwiseField chi = characteristic_from_levelset(psi, mesh);
  ElementwiseField alpha;
  alpha.values =
      chi.values.array() * alpha_lower + (1.0 - chi.values.array()) * alpha_upper;
  return alpha;
}

double fluid_volume(const TriMesh& mesh, const ElementwiseField& chi) {
  return chi.values.dot(mesh.element_areas);
}

LevelSet normalize(LevelSet psi, const SparseMatrix& p1_mass) {
  const double norm = std::sqrt(mass_inner(p1_mass, psi.psi.coeffs, psi.psi.coeffs));
  if (!(norm > 0.0)) {
    throw OptimizerError("normalize: level set is identically zero");
  }
  psi.psi.coeffs /= norm;
  return psi;
}

LevelSet volume_project(const LevelSet& psi, const TriMesh& mesh,
                        const SparseMatrix& p1_mass, double volume_lower,
                        double volume_upper) {
  if (!(0.0 < volume_lower && volume_lower <= volume_upper &&
        volume_upper <= mesh.total_area())) {
    throw OptimizerError("volume_project: invalid volume bounds");
  }
  const double initial_volume = fluid_volume(mesh, characteristic_from_levelset(psi, mesh));
  if (initial_volume >= volume_lower && initial_volume <= volume_upper) {
    return psi;
  }
  const double bound = initial_volume > volume_upper ? volume_upper : volume_lower;

  // shifted field psi - c has element mean below zero exactly when the
  // unshifted mean is below c, so the fluid volume is a nondecreasing step
  // function of c; evaluate it through the sorted element means
  const Eigen::VectorXd means = element_vertex_means(psi, mesh);
  std::vector<int> order(mesh.num_triangles());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return means[a] < means[b]; });
  std::vector<double> sorted_means(order.size());
  std::vector<double> prefix_area(order.size() + 1, 0.0);
  for (size_t i = 0; i < order.size(); ++i) {
    sorted_means[i] = means[order[i]];
    prefix_area[i + 1] = prefix_area[i] + mesh.element_areas[order[i]];
  }
  const auto volume_at = [&](double c) {
    const auto it = std::lower_bound(sorted_means.begin(), sorted_means.end(), c);
    return prefix_area[static_cast<size_t>(it - sorted_means.begin())];
  };

  const double tolerance = 0.5 * mesh.element_areas.minCoeff();
  double lo = sorted_means.front() - 1.0;  // volume 0
  double hi = sorted_means.back() + 1.0;   // full volume
  double shift = 0.0;
  bool hit_bound = false;
  std::optional<double> feasible_shift;
  for (int iter = 0; iter < 200; ++iter) {
    shift = 0.5 * (lo + hi);
    const double volume = volume_at(shift);
    if (std::abs(volume - bound) <= tolerance) {
      hit_bound = true;
      break;
    }
    if (volume >= volume_lower && volume <= volume_upper) {
      feasible_shift = shift;
    }
    if (volume > bound) {
      hi = shift;
    } else {
      lo = shift;
    }
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(hi) + std::abs(lo))) {
      break;
    }
  }
  if (!hit_bound) {
    if (!feasible_shift) {
      throw OptimizerError(
          "volume_project: bisection stalled without reaching the volume bounds "
          "(degenerate flat level set)");
    }
    shift = *feasible_shift;
  }

  LevelSet shifted = psi;
  shifted.psi.coeffs.array() -= shift;
  return normalize(std::move(shifted), p1_mass);
}

double angle(const LevelSet& psi, const TDField& g, const SparseMatrix& p1_mass) {
  const double norm_psi =
      std::sqrt(mass_inner(p1_mass, psi.psi.coeffs, psi.psi.coeffs));
  const double norm_g = std::sqrt(mass_inner(p1_mass, g.g.coeffs, g.g.coeffs));
  if (!(norm_g > 0.0)) {
    throw OptimizerError("angle: derivative field is identically zero");
  }
  if (!(norm_psi > 0.0)) {
    throw OptimizerError("angle: level set is identically zero");
  }
  const double cosine = std::clamp(
      mass_inner(p1_mass, psi.psi.coeffs, g.g.coeffs) / (norm_psi * norm_g), -1.0, 1.0);
  return std::acos(cosine);
}

LevelSet update_levelset(const LevelSet& psi, const TDField& g, double kappa,
                         const SparseMatrix& p1_mass) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw OptimizerError("update_levelset: kappa must lie in [0, 1]");
  }
  const double theta = angle(psi, g, p1_mass);
  if (std::sin(theta) < 1e-14) {
    return psi;  // already aligned
  }
  const double norm_g = std::sqrt(mass_inner(p1_mass, g.g.coeffs, g.g.coeffs));
  LevelSet next;
  next.psi.coeffs = (std::sin((1.0 - kappa) * theta) * psi.psi.coeffs +
                     (std::sin(kappa * theta) / norm_g) * g.g.coeffs) /
                    std::sin(theta);
  return normalize(std::move(next), p1_mass);
}

LevelSet default_initial_levelset(const TriMesh& mesh, const SparseMatrix& p1_mass) {
  LevelSet psi;
  psi.psi.coeffs.resize(mesh.num_vertices());
  const Eigen::Vector2d center(0.5, 0.5);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    psi.psi.coeffs[v] = -(0.1 + (mesh.vertex(v) - center).squaredNorm());
  }
  return normalize(std::move(psi), p1_mass);
}

namespace {

// everything derived from one feasible level set that the line search needs
struct ShapeEvaluation {
  LevelSet psi;
  ElementwiseField chi;
  ElementwiseField alpha;
  FlowSolution flow;
  VectorFieldP2 u_s;
  double objective = 0.0;
  double penalty_value = 0.0;
  double volume = 0.0;
  double fulfillment = 0.0;

  double merit() const { return deflated_objective(objective, penalty_value); }
};

ShapeEvaluation evaluate_shape(const TriMesh& mesh, const P2DofMap& dm,
                               const ModelParams& model, const SmoothingSolver& smoother,
                               const DeflationContext* deflation, LevelSet psi) {
  ShapeEvaluation eval;
  eval.psi = std::move(psi);
  eval.chi = characteristic_from_levelset(eval.psi, mesh);
  eval.alpha.values = eval.chi.values.array() * model.alpha_lower +
                      (1.0 - eval.chi.values.array()) * model.alpha_upper;
  eval.flow = solve_flow(mesh, dm, eval.alpha);
  eval.u_s = smoother.smooth(eval.flow.state.u);
  eval.objective = evaluate_objective(mesh, dm, eval.u_s, model.target_speed);
  eval.penalty_value =
      deflation ? total_penalty(mesh, eval.chi, *deflation->archive, deflation->params)
                : 0.0;
  eval.volume = fluid_volume(mesh, eval.chi);
  eval.fulfillment = fulfillment_fraction(mesh, dm, eval.u_s, model.target_speed);
  return eval;
}

TDField compute_generalized_td(const TriMesh& mesh, const P2DofMap& dm,
                               const ModelParams& model, const SmoothingSolver& smoother,
                               const DeflationContext* deflation,
                               const ShapeEvaluation& eval) {
  const VectorFieldP2 v_s =
      smoother.solve_adjoint(mesh, dm, eval.u_s, model.target_speed);
  const FlowAdjoint adjoint =
      solve_adjoint_flow(mesh, dm, eval.alpha, v_s, smoother.dt(),
                         eval.flow.factorization.get());
  TDField g = generalized_td_flow(dm, eval.flow.state.u, adjoint.v,
                                  model.alpha_lower, model.alpha_upper);
  if (deflation && !deflation->archive->empty()) {
    g = total_generalized_td(
        g, generalized_td_penalty(mesh, eval.chi, *deflation->archive,
                                  deflation->params, deflation->variant));
  }
  return g;
}

}  // namespace

OptimizeResult optimize(const TriMesh& mesh, const P2DofMap& dm,
                        const ModelParams& model, const OptimizerSettings& settings,
                        const DeflationContext* deflation, const LevelSet& initial,
                        const IterationSink& sink) {
  if (!(settings.eps_theta > 0.0)) {
    throw OptimizerError("optimize: eps_theta must be positive");
  }
  if (!(settings.kappa_min > 0.0 && settings.kappa_min <= settings.kappa_initial &&
        settings.kappa_initial <= 1.0)) {
    throw OptimizerError("optimize: invalid line-search step bounds");
  }
  if (settings.max_iterations < 1) {
    throw OptimizerError("optimize: max_iterations must be at least 1");
  }
  if (deflation && deflation->archive == nullptr) {
    throw OptimizerError("optimize: deflation context without archive");
  }

  const SparseMatrix p1_mass = p1_mass_matrix(mesh);
  const SmoothingSolver smoother(mesh, dm, model.smoothing_dt);

  LevelSet psi = volume_project(normalize(initial, p1_mass), mesh, p1_mass,
                                settings.volume_lower, settings.volume_upper);
  ShapeEvaluation current =
      evaluate_shape(mesh, dm, model, smoother, deflation, std::move(psi));

  OptimizeResult result;
  const auto record = [&](int iteration, double theta, double kappa) {
    IterationRecord rec;
    rec.iteration = iteration;
    rec.objective = current.objective;
    rec.penalty = current.penalty_value;
    rec.angle = theta;
    rec.volume = current.volume;
    rec.fulfillment = current.fulfillment;
    rec.kappa = kappa;
    result.history.push_back(rec);
    if (sink) sink(rec);
  };

  for (int iteration = 0;; ++iteration) {
    const TDField g = compute_generalized_td(mesh, dm, model, smoother, deflation, current);
    double theta = 0.0;
    bool stationary = false;
    try {
      theta = angle(current.psi, g, p1_mass);
    } catch (const OptimizerError&) {
      stationary = true;  // zero derivative field: nothing to align against
    }

    if (stationary || theta < settings.eps_theta) {
      record(iteration, theta, 0.0);
      result.status = OptimizeStatus::converged;
      result.final_angle = theta;
      break;
    }
    if (iteration >= settings.max_iterations) {
      record(iteration, theta, 0.0);
      result.status = OptimizeStatus::iteration_cap;
      result.final_angle = theta;
      break;
    }

    // backtracking on the merit value J (+ penalty in deflated mode)
    double kappa = settings.kappa_initial;
    ShapeEvaluation trial;
    while (true) {
      LevelSet candidate = volume_project(update_levelset(current.psi, g, kappa, p1_mass),
                                          mesh, p1_mass, settings.volume_lower,
                                          settings.volume_upper);
      trial = evaluate_shape(mesh, dm, model, smoother, deflation, std::move(candidate));
      if (trial.merit() < current.merit()) break;
      if (kappa * 0.5 < settings.kappa_min) break;  // forced step at the floor
      kappa *= 0.5;
    }

    record(iteration, theta, kappa);
    current = std::move(trial);
  }

  result.levelset = std::move(current.psi);
  result.chi = std::move(current.chi);
  result.flow = std::move(current.flow.state);
  result.smoothed_velocity = std::move(current.u_s);
  result.objective = current.objective;
  result.penalty_value = current.penalty_value;
  result.fulfillment = current.fulfillment;
  result.volume = current.volume;
  return result;
}

}  // namespace topoflow
