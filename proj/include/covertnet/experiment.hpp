#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "covertnet/dataset.hpp"
#include "covertnet/fedlearn.hpp"
#include "covertnet/metrics.hpp"
#include "covertnet/pruning.hpp"
#include "covertnet/train.hpp"

namespace covertnet {

enum class TrainMode { standalone, federated };

struct DatasetSection {
  std::size_t num_graphs = 200;
  std::size_t nodes_per_graph = 5;
  AreaBounds area_bounds;
  AdjacencyPolicy adjacency_policy = AdjacencyPolicy::mst;
  OracleConfig oracle;
};

struct FederatedSection {
  std::size_t workers = 6;
  std::size_t shard_size = 25;
  std::size_t rounds = 150;
  std::size_t local_epochs_per_round = 5;
  OptimizerStatePolicy state_policy = OptimizerStatePolicy::reset;
};

struct PruneSection {
  bool enabled = false;
  PruneConfig config{0.3, PruneScope::global_rank, std::numeric_limits<double>::infinity()};
  std::vector<double> sweep_levels;
};

/// Seeds of every stage, derived from the master seed.
struct StageSeeds {
  std::uint64_t dataset = 0;
  std::uint64_t split = 0;
  std::uint64_t init = 0;
  std::uint64_t partition = 0;
  std::uint64_t area = 0;
};

StageSeeds derive_seeds(std::uint64_t master);

/// Full description of one run; every field has a default.
struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 7;
  std::string output_dir = "runs";
  DatasetSection dataset;
  double train_fraction = 0.8;
  std::string model = "hybrid";
  TrainMode mode = TrainMode::standalone;
  TrainConfig train{1000, 1e-2, 0, OptimizerKind::adam, AdjacencyPolicy::mst, 1};
  FederatedSection federated;
  PruneSection prune;
  AreaConfig eval_area;

  /// Run directory: <output_dir>/<name>-seed<seed>.
  std::string run_dir() const;
  StageSeeds seeds() const { return derive_seeds(seed); }
};

/// Strict parse: unknown keys and bad enum names raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);
ExperimentConfig load_config(const std::string& path);

/// Echo with every default filled in and derived seeds listed.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

/// Field documentation for --help.
std::string config_help();

struct ExperimentResult {
  std::string run_dir;
  MetricsReport train_report;
  MetricsReport test_report;
  std::vector<RoundRecord> rounds;
  std::vector<CurvePoint> curve;
  std::optional<PruneValidation> prune_validation;
  std::vector<SweepRow> sweep;
};

/// generate -> label -> split -> train or federated -> optional prune/sweep -> evaluate.
/// Writes config.json, dataset.jsonl, split.json, checkpoint.json, report_{train,test}.json,
/// and curve.csv or rounds.jsonl, partition.json, prune.json, pruned_checkpoint.json, sweep.csv
/// as applicable. Errors carry the failing stage (StageError).
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Dataset generation and labeling as configured.
Dataset build_dataset(const ExperimentConfig& config, bool labeled = true);

FedConfig fed_config(const ExperimentConfig& config);

}  // namespace covertnet
