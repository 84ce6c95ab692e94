#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "covertnet/dataset.hpp"
#include "covertnet/gnn.hpp"
#include "covertnet/params.hpp"

namespace covertnet {

enum class PruneScope { global_rank, per_layer };

std::string_view to_string(PruneScope s) noexcept;
PruneScope prune_scope_from_string(std::string_view s);

struct PruneConfig {
  double sparsity = 0.0;  // fraction of prunable weights zeroed
  PruneScope scope = PruneScope::global_rank;
  double loss_threshold = std::numeric_limits<double>::infinity();
};

/// Per-tensor flags, true where a weight was zeroed. Biases never appear.
struct PruneMask {
  std::vector<std::pair<std::string, std::vector<bool>>> entries;

  std::size_t pruned_count() const;
  bool empty() const { return pruned_count() == 0; }
  const std::vector<bool>* find(const std::string& name) const;
};

struct PrunedModel {
  ParamSet params;
  PruneMask mask;
  double achieved_sparsity = 0.0;
  std::size_t prunable_count = 0;
};

/// Prunable tensors are the layer weights (names ending in ".weight").
bool is_prunable(const std::string& name);

/// Zeros the round(sparsity * total) smallest-magnitude prunable weights.
/// Ties at equal magnitude go to the lower parameter name, then the lower flat index.
PrunedModel prune_by_magnitude(const ParamSet& params, const PruneConfig& config);

struct PruneValidation {
  double original_mae = 0.0;
  double pruned_mae = 0.0;
  double delta = 0.0;
  double threshold = 0.0;
  bool accepted = false;
};

/// Accepts iff MAE(pruned) - MAE(original) <= threshold on the given split.
PruneValidation validate_prune(const ParamSet& original, const PrunedModel& pruned, const ModelSpec& spec,
                               const Dataset& dataset, const std::vector<std::uint64_t>& eval_ids, double threshold);

struct SweepRow {
  double rho = 0.0;
  double test_mae = 0.0;
  double test_medae = 0.0;
  double achieved_sparsity = 0.0;
};

/// Each level prunes the same original parameters independently.
std::vector<SweepRow> sparsity_sweep(const ParamSet& params, const ModelSpec& spec, const Dataset& dataset,
                                     const std::vector<std::uint64_t>& eval_ids, const std::vector<double>& levels,
                                     PruneScope scope = PruneScope::global_rank);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string validation_to_json(const PruneValidation& v, const PrunedModel& pruned, const PruneConfig& config);

}  // namespace covertnet
