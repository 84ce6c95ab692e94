#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "covertnet/dataset.hpp"
#include "covertnet/gnn.hpp"
#include "covertnet/optimizer.hpp"
#include "covertnet/train.hpp"

namespace covertnet {

/// What a worker does with its optimiser moments between rounds.
enum class OptimizerStatePolicy { reset, persist };

std::string_view to_string(OptimizerStatePolicy p) noexcept;
OptimizerStatePolicy state_policy_from_string(std::string_view s);

struct WorkerState {
  std::uint64_t worker_id = 0;
  std::vector<std::uint64_t> shard;
  ParamSet params;
  OptimizerState optimizer_state;
};

struct RoundRecord {
  std::size_t round = 0;
  std::string global_params_digest;
  std::vector<double> per_worker_train_loss;
  double global_test_mae = 0.0;
  double global_test_medae = 0.0;
};

struct FedConfig {
  std::size_t workers = 6;
  std::size_t rounds = 150;
  std::size_t local_epochs_per_round = 5;
  std::uint64_t seed = 0;
  ModelSpec model;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::adam;
  AdjacencyPolicy adjacency_policy = AdjacencyPolicy::mst;
  OptimizerStatePolicy state_policy = OptimizerStatePolicy::reset;
};

/// Starts from `global_params`, runs `local_epochs` full-batch epochs on the
/// worker's prepared shard and returns the resulting weights. `worker.params`
/// ends up holding them too. `last_loss` receives the final epoch's objective.
ParamSet local_train(WorkerState& worker, const ParamSet& global_params, std::size_t local_epochs,
                     const ModelSpec& spec, std::span<const PreparedSample> shard, const OptimizerConfig& opt,
                     OptimizerStatePolicy policy, double* last_loss = nullptr);

/// Element-wise mean, accumulated in list order.
ParamSet aggregate(const std::vector<ParamSet>& worker_params);

struct FedResult {
  ParamSet params;
  std::vector<RoundRecord> rounds;
};

FedResult run_federated(const FedConfig& config, const Dataset& dataset, const SplitSpec& split,
                        const PartitionSpec& partition);

/// Same, from explicit starting global parameters.
FedResult run_federated(const FedConfig& config, const Dataset& dataset, const SplitSpec& split,
                        const PartitionSpec& partition, ParamSet initial);

std::string rounds_to_jsonl(const std::vector<RoundRecord>& rounds);

}  // namespace covertnet
