#include "topoflow/deflation.hpp"

#include <stdexcept>
#include <utility>

namespace topoflow {

namespace {

RoundResult round_from_optimize(int round, OptimizeResult restart,
                                OptimizeResult* deflated) {
  RoundResult out;
  out.round = round;
  out.levelset = std::move(restart.levelset);
  out.chi = std::move(restart.chi);
  out.flow = std::move(restart.flow);
  out.smoothed_velocity = std::move(restart.smoothed_velocity);
  out.objective = restart.objective;
  out.fulfillment = restart.fulfillment;
  out.volume = restart.volume;
  out.restart_iterations = restart.iterations();
  out.restart_converged = restart.status == OptimizeStatus::converged;
  out.restart_history = std::move(restart.history);
  if (deflated != nullptr) {
    out.deflated_iterations = deflated->iterations();
    out.deflated_converged = deflated->status == OptimizeStatus::converged;
    out.deflated_history = std::move(deflated->history);
  }
  return out;
}

}  // namespace

DeflationResult deflate(const TriMesh& mesh, const P2DofMap& dm,
                        const ModelParams& model, const OptimizerSettings& settings,
                        const PenaltyParams& params, PenaltyTdVariant variant,
                        int additional_minimizers, const LevelSet& initial,
                        const RoundSink& round_sink, const IterationSink& iteration_sink) {
  if (additional_minimizers < 0) {
    throw std::invalid_argument("deflate: number of additional minimizers must be >= 0");
  }

  DeflationResult result;
  const auto archive_round = [&](RoundResult round) {
    ArchiveEntry entry;
    entry.chi = round.chi;
    entry.round = round.round;
    entry.objective = round.objective;
    entry.fulfillment = round.fulfillment;
    result.archive.add(std::move(entry));
    result.rounds.push_back(std::move(round));
    if (round_sink) round_sink(result.rounds.back(), result);
  };

  OptimizeResult first =
      optimize(mesh, dm, model, settings, nullptr, initial, iteration_sink);
  archive_round(round_from_optimize(0, std::move(first), nullptr));

  for (int i = 0; i < additional_minimizers; ++i) {
    DeflationContext context;
    context.archive = &result.archive;
    context.params = params;
    context.variant = variant;

    // escape phase: deflated objective, started from the last minimizer
    OptimizeResult deflated = optimize(mesh, dm, model, settings, &context,
                                       result.rounds.back().levelset, iteration_sink);
    // restart phase: plain objective from the escaped shape
    OptimizeResult restart = optimize(mesh, dm, model, settings, nullptr,
                                      deflated.levelset, iteration_sink);
    archive_round(round_from_optimize(i + 1, std::move(restart), &deflated));
  }
  return result;
}

}  // namespace topoflow
