#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "covertnet/dataset.hpp"
#include "covertnet/gnn.hpp"
#include "covertnet/optimizer.hpp"

namespace covertnet {

struct TrainConfig {
  std::size_t epochs = 1000;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::adam;
  AdjacencyPolicy adjacency_policy = AdjacencyPolicy::mst;
  /// Test metrics every `eval_every` epochs (and at the last epoch); 0 disables.
  std::size_t eval_every = 1;

  OptimizerConfig optimizer_config() const { return {optimizer, learning_rate}; }
};

struct CurvePoint {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // objective before this epoch's update
  double train_mae = 0.0;
  double train_medae = 0.0;
  double test_mae = 0.0;  // after the update; NaN when not evaluated
  double test_medae = 0.0;
};

struct TrainResult {
  ParamSet params;
  std::vector<CurvePoint> curve;
};

struct EpochStats {
  double loss = 0.0;
  double mae = 0.0;
  double medae = 0.0;
};

/// One full-batch update: loss is the mean over samples of each sample's MAE.
/// Samples are visited in the given order; callers pass ascending ids.
EpochStats full_batch_step(const ModelSpec& spec, ParamSet& params, std::span<const PreparedSample> samples,
                           OptimizerState& state, const OptimizerConfig& config);

/// Sorted copy of `ids`.
std::vector<std::uint64_t> ascending(std::vector<std::uint64_t> ids);

TrainResult train_standalone(const ModelSpec& spec, const Dataset& dataset, const SplitSpec& split,
                             const TrainConfig& config);

/// Same, from explicit starting parameters.
TrainResult train_standalone(const ModelSpec& spec, const Dataset& dataset, const SplitSpec& split,
                             const TrainConfig& config, ParamSet initial);

std::string curve_to_csv(const std::vector<CurvePoint>& curve);

}  // namespace covertnet
