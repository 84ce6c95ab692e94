#include "covertnet/fedlearn.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "covertnet/error.hpp"
#include "covertnet/metrics.hpp"
#include "covertnet/parallel.hpp"

namespace covertnet {

std::string_view to_string(OptimizerStatePolicy p) noexcept {
  return p == OptimizerStatePolicy::reset ? "reset" : "persist";
}

OptimizerStatePolicy state_policy_from_string(std::string_view s) {
  if (s == "reset") return OptimizerStatePolicy::reset;
  if (s == "persist") return OptimizerStatePolicy::persist;
  throw ConfigError("unknown optimizer state policy '" + std::string(s) + "'");
}

ParamSet local_train(WorkerState& worker, const ParamSet& global_params, std::size_t local_epochs,
                     const ModelSpec& spec, std::span<const PreparedSample> shard, const OptimizerConfig& opt,
                     OptimizerStatePolicy policy, double* last_loss) {
  if (!worker.params.empty() && !worker.params.congruent(global_params))
    throw InvalidInput("local_train: global parameters not congruent with worker model");
  check_params(spec, global_params);
  worker.params = global_params;
  if (policy == OptimizerStatePolicy::reset) worker.optimizer_state = OptimizerState{};
  for (std::size_t e = 0; e < local_epochs; ++e) {
    const auto stats = full_batch_step(spec, worker.params, shard, worker.optimizer_state, opt);
    if (last_loss) *last_loss = stats.loss;
  }
  return worker.params;
}

ParamSet aggregate(const std::vector<ParamSet>& worker_params) {
  if (worker_params.empty()) throw InvalidInput("aggregate: no parameter sets");
  for (const auto& p : worker_params)
    if (!p.congruent(worker_params.front())) throw InvalidInput("aggregate: parameter sets are not congruent");
  ParamSet mean = worker_params.front().zeros_like();
  for (const auto& p : worker_params) {
    auto src = p.begin();
    for (auto& [name, t] : mean) t += (src++)->second;
  }
  const double inv = 1.0 / static_cast<double>(worker_params.size());
  for (auto& [name, t] : mean) t *= inv;
  return mean;
}

FedResult run_federated(const FedConfig& config, const Dataset& dataset, const SplitSpec& split,
                        const PartitionSpec& partition) {
  return run_federated(config, dataset, split, partition, init_params(config.model, config.seed));
}

FedResult run_federated(const FedConfig& config, const Dataset& dataset, const SplitSpec& split,
                        const PartitionSpec& partition, ParamSet initial) {
  if (config.workers < 1 || config.rounds < 1) throw InvalidInput("federated: workers and rounds must be >= 1");
  if (partition.worker_shards.empty()) throw InvalidInput("federated: empty partition");
  if (partition.worker_shards.size() != config.workers)
    throw InvalidInput("federated: partition has " + std::to_string(partition.worker_shards.size()) +
                       " shards for " + std::to_string(config.workers) + " workers");
  if (!dataset.labeled()) throw InvalidInput("federated: dataset is not labeled");
  const std::set<std::uint64_t> train(split.train_ids.begin(), split.train_ids.end());
  for (const auto& shard : partition.worker_shards) {
    if (shard.empty()) throw InvalidInput("federated: empty worker shard");
    for (auto id : shard)
      if (!train.contains(id)) throw InvalidInput("federated: shard sample " + std::to_string(id) + " is not in the training split");
  }
  check_params(config.model, initial);

  const Dataset& ds = dataset.adjacency_policy == config.adjacency_policy
                          ? dataset
                          : with_adjacency_policy(dataset, config.adjacency_policy);
  std::vector<WorkerState> workers(config.workers);
  std::vector<std::vector<PreparedSample>> shards(config.workers);
  for (std::size_t k = 0; k < config.workers; ++k) {
    workers[k].worker_id = k;
    workers[k].shard = ascending(partition.worker_shards[k]);
    shards[k] = prepare(ds, workers[k].shard);
  }
  const auto test = prepare(ds, ascending(split.test_ids));
  const OptimizerConfig opt{config.optimizer, config.learning_rate};

  FedResult result{std::move(initial), {}};
  std::vector<ParamSet> local(config.workers);
  std::vector<double> losses(config.workers, 0.0);
  for (std::size_t t = 1; t <= config.rounds; ++t) {
    parallel_for(config.workers, [&](std::size_t k) {
      local[k] = local_train(workers[k], result.params, config.local_epochs_per_round, config.model, shards[k], opt,
                             config.state_policy, &losses[k]);
    });
    result.params = aggregate(local);
    RoundRecord rec;
    rec.round = t;
    rec.global_params_digest = digest(result.params);
    rec.per_worker_train_loss = losses;
    if (!test.empty()) {
      const auto e = error_summary(config.model, result.params, test);
      rec.global_test_mae = e.mae;
      rec.global_test_medae = e.medae;
    }
    result.rounds.push_back(std::move(rec));
  }
  return result;
}

std::string rounds_to_jsonl(const std::vector<RoundRecord>& rounds) {
  std::ostringstream os;
  for (const auto& r : rounds) {
    nlohmann::ordered_json j{{"round", r.round},
                             {"global_params_digest", r.global_params_digest},
                             {"per_worker_train_loss", r.per_worker_train_loss},
                             {"global_test_mae", r.global_test_mae},
                             {"global_test_medae", r.global_test_medae}};
    os << j.dump() << '\n';
  }
  return os.str();
}

}  // namespace covertnet
