#include "covertnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "covertnet/error.hpp"
#include "covertnet/io.hpp"
#include "covertnet/parallel.hpp"
#include "covertnet/random.hpp"

namespace covertnet {

using json = nlohmann::ordered_json;

std::string_view to_string(AdjacencyPolicy p) noexcept { return p == AdjacencyPolicy::complete ? "complete" : "mst"; }

AdjacencyPolicy adjacency_policy_from_string(std::string_view s) {
  if (s == "complete") return AdjacencyPolicy::complete;
  if (s == "mst") return AdjacencyPolicy::mst;
  throw ConfigError("unknown adjacency policy '" + std::string(s) + "'");
}

std::string_view to_string(OracleKind k) noexcept {
  switch (k) {
    case OracleKind::brute_force:
      return "brute_force";
    case OracleKind::mst:
      return "mst";
    case OracleKind::local_search:
      return "local_search";
  }
  return "?";
}

OracleKind oracle_from_string(std::string_view s) {
  for (auto k : {OracleKind::brute_force, OracleKind::mst, OracleKind::local_search})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown oracle '" + std::string(s) + "'");
}

AdjacencyMatrix message_passing_adjacency(const Topology& topo, AdjacencyPolicy policy) {
  const std::size_t n = topo.size();
  if (policy == AdjacencyPolicy::complete || n < 2) return AdjacencyMatrix::square(n, true);
  auto adj = AdjacencyMatrix::square(n);
  for (std::size_t i = 0; i < n; ++i) adj.set(i, i, true);
  for (const auto& [i, j] : mst(topo).edges) {
    adj.set(i, j, true);
    adj.set(j, i, true);
  }
  return adj;
}

RadiusAssignment solve(const Topology& topo, const OracleConfig& cfg) {
  switch (cfg.kind) {
    case OracleKind::brute_force:
      return brute_force_mast(topo, cfg.area);
    case OracleKind::mst:
      return radii_from_tree(topo, mst(topo));
    case OracleKind::local_search:
      return local_search_mast(topo, cfg.local_search_iters, cfg.area);
  }
  throw ConfigError("unknown oracle");
}

bool Dataset::labeled() const {
  return !samples.empty() && std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.labels.has_value(); });
}

const GraphSample& Dataset::sample(std::uint64_t id) const {
  if (id >= samples.size() || samples[id].id != id) throw InvalidInput("dataset has no sample " + std::to_string(id));
  return samples[id];
}

Tensor normalised_features(const Topology& topo, const AreaBounds& bounds) {
  Tensor f(topo.size(), 2);
  for (std::size_t i = 0; i < topo.size(); ++i) {
    f(i, 0) = topo.positions[i].x / bounds.width;
    f(i, 1) = topo.positions[i].y / bounds.height;
  }
  return f;
}

Dataset generate(std::size_t num_graphs, std::size_t nodes_per_graph, AreaBounds bounds, std::uint64_t seed,
                 AdjacencyPolicy policy) {
  if (!(bounds.width > 0.0) || !(bounds.height > 0.0) || !std::isfinite(bounds.width) || !std::isfinite(bounds.height))
    throw InvalidInput("generate: area bounds must be positive and finite");
  if (num_graphs < 1) throw InvalidInput("generate: need at least one graph");
  if (nodes_per_graph < 2) throw InvalidInput("generate: need at least two nodes per graph");
  const double min_gap = 1e-6 * std::max(bounds.width, bounds.height);

  Dataset ds;
  ds.area_bounds = bounds;
  ds.seed = seed;
  ds.adjacency_policy = policy;
  ds.samples.resize(num_graphs);
  for (std::size_t id = 0; id < num_graphs; ++id) {
    Rng rng(substream_seed(seed, id));
    Topology topo;
    for (;;) {
      topo.positions.clear();
      for (std::size_t k = 0; k < nodes_per_graph; ++k) {
        const double x = rng.uniform(0.0, bounds.width);
        const double y = rng.uniform(0.0, bounds.height);
        topo.positions.push_back({x, y});
      }
      const auto d = pairwise_distances(topo.positions);
      bool ok = true;
      for (std::size_t i = 0; i < nodes_per_graph && ok; ++i)
        for (std::size_t j = i + 1; j < nodes_per_graph && ok; ++j) ok = d(i, j) >= min_gap;
      if (ok) break;
    }
    auto& s = ds.samples[id];
    s.id = id;
    s.features = normalised_features(topo, bounds);
    s.mp_adjacency = message_passing_adjacency(topo, policy);
    s.topology = std::move(topo);
  }
  return ds;
}

Dataset label(const Dataset& dataset, const OracleConfig& oracle) {
  if (oracle.kind == OracleKind::brute_force)
    for (const auto& s : dataset.samples)
      if (s.node_count() > kBruteForceMaxNodes)
        throw ConfigError("label: brute_force oracle limited to " + std::to_string(kBruteForceMaxNodes) +
                          " nodes per graph; choose local_search");
  Dataset out = dataset;
  parallel_for(out.samples.size(), [&](std::size_t i) {
    auto& s = out.samples[i];
    s.labels = solve(s.topology, oracle);
    s.mp_adjacency = message_passing_adjacency(s.topology, out.adjacency_policy);
  });
  out.oracle_config = oracle;
  return out;
}

Dataset with_adjacency_policy(const Dataset& dataset, AdjacencyPolicy policy) {
  Dataset out = dataset;
  out.adjacency_policy = policy;
  for (auto& s : out.samples) s.mp_adjacency = message_passing_adjacency(s.topology, policy);
  return out;
}

SplitSpec split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidInput("split: train fraction must lie in (0, 1)");
  const std::size_t total = dataset.samples.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(total)));
  if (n_train == 0 || n_train >= total) throw InvalidInput("split: one side of the split would be empty");
  std::vector<std::uint64_t> ids(total);
  for (std::size_t i = 0; i < total; ++i) ids[i] = dataset.samples[i].id;
  Rng rng(seed);
  rng.shuffle(std::span<std::uint64_t>(ids));
  SplitSpec sp;
  sp.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  sp.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  return sp;
}

PartitionSpec partition(const SplitSpec& split, std::size_t workers, std::size_t shard_size, std::uint64_t seed) {
  if (workers < 1 || shard_size < 1) throw InvalidInput("partition: workers and shard size must be >= 1");
  if (workers * shard_size > split.train_ids.size())
    throw InvalidInput("partition: " + std::to_string(workers) + " x " + std::to_string(shard_size) +
                       " exceeds the " + std::to_string(split.train_ids.size()) + " training samples");
  std::vector<std::uint64_t> ids = split.train_ids;
  Rng rng(seed);
  rng.shuffle(std::span<std::uint64_t>(ids));
  PartitionSpec p;
  p.shard_size = shard_size;
  for (std::size_t k = 0; k < workers; ++k) {
    auto first = ids.begin() + static_cast<std::ptrdiff_t>(k * shard_size);
    p.worker_shards.emplace_back(first, first + static_cast<std::ptrdiff_t>(shard_size));
  }
  return p;
}

// ---- serialisation ----

namespace {

json oracle_to_json(const OracleConfig& c) {
  return json{{"oracle", to_string(c.kind)},
              {"area_method", to_string(c.area.method)},
              {"area_samples", c.area.samples},
              {"area_seed", c.area.seed},
              {"local_search_iters", c.local_search_iters}};
}

OracleConfig oracle_from_json(const json& j) {
  OracleConfig c;
  c.kind = oracle_from_string(j.at("oracle").get<std::string>());
  c.area.method = area_method_from_string(j.at("area_method").get<std::string>());
  c.area.samples = j.at("area_samples").get<std::uint64_t>();
  c.area.seed = j.at("area_seed").get<std::uint64_t>();
  c.local_search_iters = j.value("local_search_iters", std::size_t{100});
  return c;
}

json matrix_json(const BoolMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return rows;
}

json tensor_rows_json(const Tensor& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < t.cols(); ++j) row.push_back(t(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& ds) {
  json header{{"schema_version", kSchemaVersion},
              {"kind", "dataset_header"},
              {"num_samples", ds.samples.size()},
              {"area_bounds", {ds.area_bounds.width, ds.area_bounds.height}},
              {"seed", ds.seed},
              {"adjacency_policy", to_string(ds.adjacency_policy)},
              {"oracle_config", ds.oracle_config ? oracle_to_json(*ds.oracle_config) : json(nullptr)}};
  out << header.dump() << '\n';
  for (const auto& s : ds.samples) {
    json positions = json::array();
    for (const auto& p : s.topology.positions) positions.push_back({p.x, p.y});
    json line{{"schema_version", kSchemaVersion},
              {"id", s.id},
              {"positions", std::move(positions)},
              {"mp_adjacency", matrix_json(s.mp_adjacency)},
              {"features", tensor_rows_json(s.features)},
              {"labels", s.labels ? json(s.labels->radii) : json(nullptr)},
              {"label_source", s.labels ? json(to_string(s.labels->source)) : json(nullptr)}};
    out << line.dump() << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::string text;
  if (!std::getline(in, text)) throw InvalidInput("dataset: missing header line");
  Dataset ds;
  try {
    const json header = json::parse(text);
    if (header.at("schema_version").get<int>() != kSchemaVersion)
      throw InvalidInput("dataset: unsupported schema version");
    ds.area_bounds = {header.at("area_bounds").at(0).get<double>(), header.at("area_bounds").at(1).get<double>()};
    ds.seed = header.at("seed").get<std::uint64_t>();
    ds.adjacency_policy = adjacency_policy_from_string(header.value("adjacency_policy", std::string("mst")));
    if (!header.at("oracle_config").is_null()) ds.oracle_config = oracle_from_json(header.at("oracle_config"));
    while (std::getline(in, text)) {
      if (text.empty()) continue;
      const json j = json::parse(text);
      if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw InvalidInput("dataset: unsupported schema version");
      GraphSample s;
      s.id = j.at("id").get<std::uint64_t>();
      for (const auto& p : j.at("positions")) s.topology.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      const std::size_t n = s.topology.size();
      const auto& adj = j.at("mp_adjacency");
      if (adj.size() != n) throw InvalidInput("dataset: mp_adjacency size mismatch in sample " + std::to_string(s.id));
      s.mp_adjacency = AdjacencyMatrix::square(n);
      for (std::size_t a = 0; a < n; ++a) {
        if (adj.at(a).size() != n) throw InvalidInput("dataset: mp_adjacency row size mismatch");
        for (std::size_t b = 0; b < n; ++b) s.mp_adjacency.set(a, b, adj.at(a).at(b).get<int>() != 0);
      }
      const auto& feats = j.at("features");
      if (feats.size() != n) throw InvalidInput("dataset: feature rows do not match node count");
      const std::size_t f = n == 0 ? 0 : feats.at(0).size();
      s.features = Tensor(n, f);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < f; ++b) s.features(a, b) = feats.at(a).at(b).get<double>();
      if (!j.at("labels").is_null()) {
        RadiusAssignment r;
        r.radii = j.at("labels").get<std::vector<double>>();
        if (r.radii.size() != n) throw InvalidInput("dataset: label count does not match node count");
        r.source = radius_source_from_string(j.value("label_source", std::string("brute_force")));
        s.labels = std::move(r);
      }
      ds.samples.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("dataset: malformed JSON: ") + e.what());
  }
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    if (ds.samples[i].id != i) throw InvalidInput("dataset: sample ids must be dense from 0");
  return ds;
}

void save_dataset(const std::string& path, const Dataset& dataset) {
  std::ostringstream ss;
  write_dataset(ss, dataset);
  write_file(path, ss.str());
}

Dataset load_dataset(const std::string& path) {
  std::istringstream ss(read_file(path));
  return read_dataset(ss);
}

std::string split_to_json(const SplitSpec& split) {
  return json{{"schema_version", kSchemaVersion}, {"train_ids", split.train_ids}, {"test_ids", split.test_ids}}.dump() +
         "\n";
}

SplitSpec split_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    SplitSpec s{j.at("train_ids").get<std::vector<std::uint64_t>>(), j.at("test_ids").get<std::vector<std::uint64_t>>()};
    std::vector<std::uint64_t> all = s.train_ids;
    all.insert(all.end(), s.test_ids.begin(), s.test_ids.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw InvalidInput("split: train and test overlap");
    return s;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("split: malformed JSON: ") + e.what());
  }
}

std::string partition_to_json(const PartitionSpec& p) {
  return json{{"schema_version", kSchemaVersion}, {"shard_size", p.shard_size}, {"worker_shards", p.worker_shards}}
             .dump() +
         "\n";
}

PartitionSpec partition_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    return {j.at("worker_shards").get<std::vector<std::vector<std::uint64_t>>>(), j.at("shard_size").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("partition: malformed JSON: ") + e.what());
  }
}

}  // namespace covertnet
