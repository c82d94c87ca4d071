// Command-line driver: solve / optimize / deflate / eval subcommands around
// the flow topology-optimization library.

#include <CLI11.hpp>

#include "topoflow/config.hpp"
#include "topoflow/deflation.hpp"
#include "topoflow/io.hpp"
#include "topoflow/mesh.hpp"
#include "topoflow/objective.hpp"
#include "topoflow/optimizer.hpp"
#include "topoflow/physics.hpp"

#include <filesystem>
#include <iostream>
#include <string>

namespace {

using namespace topoflow;

struct CommandContext {
  RunConfig config;
  std::filesystem::path out_dir;
  TriMesh mesh;
  P2DofMap dofmap;
};

std::string zero_pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

CommandContext make_context(const std::string& config_file,
                            const ConfigOverrides& overrides) {
  CommandContext ctx;
  ctx.config = config_file.empty() ? parse_config("", overrides)
                                   : parse_config_file(config_file, overrides);
  ctx.out_dir = ctx.config.output_dir;
  std::filesystem::create_directories(ctx.out_dir);
  write_text_atomic(ctx.out_dir / "config_resolved.cfg", serialize_config(ctx.config));
  ctx.mesh = build_unit_square_mesh(ctx.config.mesh_n);
  ctx.dofmap = build_p2_dofmap(ctx.mesh);
  return ctx;
}

std::vector<NamedCellField> shape_cell_fields(const ElementwiseField& chi,
                                              const ElementwiseField& alpha) {
  return {{"chi", chi.values}, {"alpha", alpha.values}};
}

void print_iteration(const char* phase, const IterationRecord& rec) {
  std::cerr << "[" << phase << "] iter " << rec.iteration
            << " J=" << format_double(rec.objective) << " P=" << format_double(rec.penalty)
            << " theta=" << format_double(rec.angle)
            << " vol=" << format_double(rec.volume)
            << " fulfill=" << format_double(rec.fulfillment)
            << " kappa=" << format_double(rec.kappa) << "\n";
}

int run_solve(const CommandContext& ctx, const std::string& shape_path) {
  const ElementwiseField chi = chi_from_vtk(read_vtk(shape_path), ctx.mesh);
  ElementwiseField alpha;
  alpha.values = chi.values.array() * ctx.config.alpha_L +
                 (1.0 - chi.values.array()) * ctx.config.alpha_U;
  const FlowSolution flow = solve_flow(ctx.mesh, ctx.dofmap, alpha);
  const VectorFieldP2 u_s =
      solve_smoothing(ctx.mesh, ctx.dofmap, flow.state.u, ctx.config.dt);

  auto nodal = flow_point_fields(ctx.dofmap, flow.state, u_s);
  write_field_vtk(ctx.mesh, nodal, shape_cell_fields(chi, alpha),
                  ctx.out_dir / "flow.vtk");

  std::cout << "objective = "
            << format_double(evaluate_objective(ctx.mesh, ctx.dofmap, u_s, ctx.config.u_t))
            << "\n";
  std::cout << "fulfillment = "
            << format_double(fulfillment_fraction(ctx.mesh, ctx.dofmap, u_s, ctx.config.u_t))
            << "\n";
  std::cout << "volume = " << format_double(fluid_volume(ctx.mesh, chi)) << "\n";
  std::cout << "inlet_flux = " << format_double(flow.inlet_flux) << "\n";
  std::cout << "outlet_flux = " << format_double(flow.outlet_flux) << "\n";
  return 0;
}

int run_eval(const CommandContext& ctx, const std::string& shape_path) {
  const ElementwiseField chi = chi_from_vtk(read_vtk(shape_path), ctx.mesh);
  ElementwiseField alpha;
  alpha.values = chi.values.array() * ctx.config.alpha_L +
                 (1.0 - chi.values.array()) * ctx.config.alpha_U;
  const FlowSolution flow = solve_flow(ctx.mesh, ctx.dofmap, alpha);
  const VectorFieldP2 u_s =
      solve_smoothing(ctx.mesh, ctx.dofmap, flow.state.u, ctx.config.dt);
  std::cout << "objective = "
            << format_double(evaluate_objective(ctx.mesh, ctx.dofmap, u_s, ctx.config.u_t))
            << "\n";
  std::cout << "fulfillment = "
            << format_double(fulfillment_fraction(ctx.mesh, ctx.dofmap, u_s, ctx.config.u_t))
            << "\n";
  std::cout << "volume = " << format_double(fluid_volume(ctx.mesh, chi)) << "\n";
  return 0;
}

int run_optimize(const CommandContext& ctx, const std::string& initial_path) {
  const SparseMatrix p1_mass = p1_mass_matrix(ctx.mesh);
  const LevelSet initial = initial_path.empty()
                               ? default_initial_levelset(ctx.mesh, p1_mass)
                               : psi_from_vtk(read_vtk(initial_path), ctx.mesh);

  const OptimizeResult result =
      optimize(ctx.mesh, ctx.dofmap, ctx.config.model(), ctx.config.optimizer(), nullptr,
               initial, [](const IterationRecord& rec) { print_iteration("optimize", rec); });

  write_history_csv(result.history, ctx.out_dir / "history.csv");
  ElementwiseField alpha;
  alpha.values = result.chi.values.array() * ctx.config.alpha_L +
                 (1.0 - result.chi.values.array()) * ctx.config.alpha_U;
  auto nodal = flow_point_fields(ctx.dofmap, result.flow, result.smoothed_velocity);
  nodal.insert(nodal.begin(), {"psi", result.levelset.psi.coeffs});
  write_field_vtk(ctx.mesh, nodal, shape_cell_fields(result.chi, alpha),
                  ctx.out_dir / "final.vtk");

  const bool converged = result.status == OptimizeStatus::converged;
  std::cout << "status = " << (converged ? "converged" : "iteration_cap") << "\n";
  std::cout << "iterations = " << result.iterations() << "\n";
  std::cout << "objective = " << format_double(result.objective) << "\n";
  std::cout << "fulfillment = " << format_double(result.fulfillment) << "\n";
  std::cout << "volume = " << format_double(result.volume) << "\n";
  std::cout << "theta = " << format_double(result.final_angle) << "\n";
  if (!converged) {
    std::cerr << "error: optimize: iteration cap reached before the angle tolerance\n";
    return 3;
  }
  return 0;
}

int run_deflate(const CommandContext& ctx) {
  const SparseMatrix p1_mass = p1_mass_matrix(ctx.mesh);
  const LevelSet initial = default_initial_levelset(ctx.mesh, p1_mass);

  const auto round_sink = [&](const RoundResult& round, const DeflationResult& partial) {
    const std::string tag = zero_pad(round.round, 3);
    ElementwiseField alpha;
    alpha.values = round.chi.values.array() * ctx.config.alpha_L +
                   (1.0 - round.chi.values.array()) * ctx.config.alpha_U;
    auto nodal = flow_point_fields(ctx.dofmap, round.flow, round.smoothed_velocity);
    nodal.insert(nodal.begin(), {"psi", round.levelset.psi.coeffs});
    write_field_vtk(ctx.mesh, nodal, shape_cell_fields(round.chi, alpha),
                    ctx.out_dir / ("round_" + tag + ".vtk"));
    if (!round.deflated_history.empty()) {
      write_history_csv(round.deflated_history,
                        ctx.out_dir / ("history_" + tag + "_deflated.csv"));
    }
    write_history_csv(round.restart_history,
                      ctx.out_dir / ("history_" + tag + "_restart.csv"));
    // keep the summary current after every round so an interrupted campaign
    // retains everything finished so far
    write_summary_json(partial, ctx.mesh, ctx.out_dir / "summary.json");
    std::cerr << "[deflate] round " << round.round
              << " objective=" << format_double(round.objective)
              << " fulfillment=" << format_double(round.fulfillment)
              << " iterations=" << round.deflated_iterations << "+"
              << round.restart_iterations << "\n";
  };

  const DeflationResult result = deflate(
      ctx.mesh, ctx.dofmap, ctx.config.model(), ctx.config.optimizer(),
      ctx.config.penalty(), ctx.config.variant(), ctx.config.deflation_rounds, initial,
      round_sink, [](const IterationRecord& rec) { print_iteration("deflate", rec); });

  std::cout << "minimizers = " << result.rounds.size() << "\n";
  for (const auto& round : result.rounds) {
    std::cout << "fulfillment[" << round.round
              << "] = " << format_double(round.fulfillment) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flow topology optimization for plate-type distributors"};
  app.require_subcommand(1);

  std::string config_file;
  std::map<std::string, std::string> raw_values;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "configuration file (key = value lines)");
    for (const auto& key : config_keys()) {
      cmd->add_option("--" + key, raw_values[key], "override config key " + key);
    }
  };

  auto* solve_cmd = app.add_subcommand("solve", "forward solve of a stored shape");
  std::string solve_shape;
  solve_cmd->add_option("--shape", solve_shape, "shape file (.vtk with a chi cell array)")
      ->required();
  add_common(solve_cmd);

  auto* optimize_cmd = app.add_subcommand("optimize", "compute a single minimizer");
  std::string initial_path;
  optimize_cmd->add_option("--initial", initial_path,
                           "initial level set (.vtk with a psi point array)");
  add_common(optimize_cmd);

  auto* deflate_cmd =
      app.add_subcommand("deflate", "deflation campaign producing multiple minimizers");
  add_common(deflate_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "objective/fulfillment of a stored shape");
  std::string eval_shape;
  eval_cmd->add_option("--shape", eval_shape, "shape file (.vtk with a chi cell array)")
      ->required();
  add_common(eval_cmd);

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = app.get_subcommands().front();
  topoflow::ConfigOverrides overrides;
  for (const auto& [key, value] : raw_values) {
    if (active->count("--" + key) > 0) overrides.emplace_back(key, value);
  }

  try {
    const CommandContext ctx = make_context(config_file, overrides);
    if (active == solve_cmd) return run_solve(ctx, solve_shape);
    if (active == optimize_cmd) return run_optimize(ctx, initial_path);
    if (active == deflate_cmd) return run_deflate(ctx);
    if (active == eval_cmd) return run_eval(ctx, eval_shape);
    std::cerr << "error: unknown subcommand\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
