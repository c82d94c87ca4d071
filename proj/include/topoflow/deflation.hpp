#pragma once

#include "topoflow/optimizer.hpp"

#include <functional>
#include <vector>

namespace topoflow {

// One archived minimizer: the restart solution plus the iteration counts of
// the deflated escape phase and the undeflated restart phase that produced
// it. Round 0 is the plain initial solve (no deflated phase).
struct RoundResult {
  int round = 0;
  LevelSet levelset;
  ElementwiseField chi;
  FlowState flow;
  VectorFieldP2 smoothed_velocity;
  double objective = 0.0;
  double fulfillment = 0.0;
  double volume = 0.0;
  int deflated_iterations = 0;
  int restart_iterations = 0;
  bool deflated_converged = true;
  bool restart_converged = false;
  std::vector<IterationRecord> deflated_history;
  std::vector<IterationRecord> restart_history;
};

struct DeflationResult {
  std::vector<RoundResult> rounds;
  ShapeArchive archive;
};

// called after each completed round; used for crash-safe persistence
using RoundSink = std::function<void(const RoundResult&, const DeflationResult&)>;

// Outer deflation loop: solve the plain problem once, then alternate
//   deflated solve (penalty against everything archived, started from the
//   last minimizer) -> undeflated restart from the escaped shape
// archiving the restart solution each round. A phase that stalls at the
// iteration cap is marked but the loop continues with its best iterate.
DeflationResult deflate(const TriMesh& mesh, const P2DofMap& dofmap,
                        const ModelParams& model, const OptimizerSettings& settings,
                        const PenaltyParams& params, PenaltyTdVariant variant,
                        int additional_minimizers, const LevelSet& initial,
                        const RoundSink& round_sink = {},
                        const IterationSink& iteration_sink = {});

}  // namespace topoflow
