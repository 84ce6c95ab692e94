#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covertnet/oracle.hpp"
#include "covertnet/tensor.hpp"

namespace covertnet {

/// Graph the GNN passes messages over; always includes self-loops.
enum class AdjacencyPolicy { complete, mst };

std::string_view to_string(AdjacencyPolicy p) noexcept;
AdjacencyPolicy adjacency_policy_from_string(std::string_view s);

AdjacencyMatrix message_passing_adjacency(const Topology& topo, AdjacencyPolicy policy);

enum class OracleKind { brute_force, mst, local_search };

std::string_view to_string(OracleKind k) noexcept;
OracleKind oracle_from_string(std::string_view s);

struct OracleConfig {
  OracleKind kind = OracleKind::brute_force;
  AreaConfig area;
  std::size_t local_search_iters = 100;
};

/// Runs the configured oracle on one topology.
RadiusAssignment solve(const Topology& topo, const OracleConfig& cfg);

struct AreaBounds {
  double width = 100.0;
  double height = 100.0;
};

struct GraphSample {
  std::uint64_t id = 0;
  Topology topology;
  AdjacencyMatrix mp_adjacency;
  Tensor features;  // N x 2, coordinates scaled into [0,1]^2
  std::optional<RadiusAssignment> labels;

  std::size_t node_count() const noexcept { return topology.size(); }
  bool operator==(const GraphSample&) const = default;
};

struct Dataset {
  std::vector<GraphSample> samples;
  AreaBounds area_bounds;
  std::uint64_t seed = 0;
  AdjacencyPolicy adjacency_policy = AdjacencyPolicy::mst;
  std::optional<OracleConfig> oracle_config;

  bool labeled() const;
  const GraphSample& sample(std::uint64_t id) const;
};

struct SplitSpec {
  std::vector<std::uint64_t> train_ids;
  std::vector<std::uint64_t> test_ids;

  bool operator==(const SplitSpec&) const = default;
};

struct PartitionSpec {
  std::vector<std::vector<std::uint64_t>> worker_shards;
  std::size_t shard_size = 0;

  bool operator==(const PartitionSpec&) const = default;
};

Tensor normalised_features(const Topology& topo, const AreaBounds& bounds);

/// Uniform i.i.d. positions; sample `id` draws from its own substream of `seed`
/// and is redrawn while any pair is closer than 1e-6 * max(width, height).
Dataset generate(std::size_t num_graphs, std::size_t nodes_per_graph, AreaBounds bounds, std::uint64_t seed,
                 AdjacencyPolicy policy = AdjacencyPolicy::mst);

/// Labels every sample with the oracle (samples run in parallel).
Dataset label(const Dataset& dataset, const OracleConfig& oracle);

/// Rebuilds every sample's message-passing graph.
Dataset with_adjacency_policy(const Dataset& dataset, AdjacencyPolicy policy);

SplitSpec split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

PartitionSpec partition(const SplitSpec& split, std::size_t workers, std::size_t shard_size, std::uint64_t seed);

inline constexpr int kSchemaVersion = 1;

void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);

std::string split_to_json(const SplitSpec& split);
SplitSpec split_from_json(const std::string& text);
std::string partition_to_json(const PartitionSpec& partition);
PartitionSpec partition_from_json(const std::string& text);

}  // namespace covertnet
