#include "covertnet/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "covertnet/checkpoint.hpp"
#include "covertnet/error.hpp"
#include "covertnet/io.hpp"
#include "covertnet/random.hpp"

namespace covertnet {

using json = nlohmann::ordered_json;

StageSeeds derive_seeds(std::uint64_t master) {
  return {master, substream_seed(master, 1), substream_seed(master, 2), substream_seed(master, 3),
          substream_seed(master, 4)};
}

std::string ExperimentConfig::run_dir() const {
  return (std::filesystem::path(output_dir) / (name + "-seed" + std::to_string(seed))).string();
}

namespace {

// Reads fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  template <typename T, typename Parse>
  void get_enum(const char* key, T& out, Parse parse) {
    std::string s;
    get(key, s);
    if (!s.empty()) out = parse(s);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
void require(bool ok, const std::string& what) {
  if (!ok) throw T(what);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  {
    Section root(j, "config");
    int version = kSchemaVersion;
    root.get("schema_version", version);
    require<ConfigError>(version == kSchemaVersion, "config: unsupported schema_version");
    root.get("name", c.name);
    root.get("seed", c.seed);
    root.get("output_dir", c.output_dir);
    root.get("model", c.model);
    root.get_enum("mode", c.mode, [](const std::string& s) {
      if (s == "standalone") return TrainMode::standalone;
      if (s == "federated") return TrainMode::federated;
      throw ConfigError("config.mode: unknown mode '" + s + "'");
    });
    if (const json* d = root.child("dataset")) {
      Section s(*d, "config.dataset");
      s.get("num_graphs", c.dataset.num_graphs);
      s.get("nodes_per_graph", c.dataset.nodes_per_graph);
      std::vector<double> bounds;
      s.get("area_bounds", bounds);
      if (!bounds.empty()) {
        require<ConfigError>(bounds.size() == 2, "config.dataset.area_bounds: expected [width, height]");
        c.dataset.area_bounds = {bounds[0], bounds[1]};
      }
      s.get_enum("adjacency_policy", c.dataset.adjacency_policy, adjacency_policy_from_string);
      s.get_enum("oracle", c.dataset.oracle.kind, oracle_from_string);
      s.get_enum("area_method", c.dataset.oracle.area.method, area_method_from_string);
      s.get("area_samples", c.dataset.oracle.area.samples);
      s.get("local_search_iters", c.dataset.oracle.local_search_iters);
    }
    if (const json* sp = root.child("split")) {
      Section s(*sp, "config.split");
      s.get("train_fraction", c.train_fraction);
    }
    if (const json* t = root.child("train")) {
      Section s(*t, "config.train");
      s.get("epochs", c.train.epochs);
      s.get("learning_rate", c.train.learning_rate);
      s.get_enum("optimizer", c.train.optimizer, optimizer_from_string);
      s.get("eval_every", c.train.eval_every);
    }
    if (const json* f = root.child("federated")) {
      Section s(*f, "config.federated");
      s.get("workers", c.federated.workers);
      s.get("shard_size", c.federated.shard_size);
      s.get("rounds", c.federated.rounds);
      s.get("local_epochs_per_round", c.federated.local_epochs_per_round);
      s.get_enum("optimizer_state", c.federated.state_policy, state_policy_from_string);
    }
    if (const json* p = root.child("prune")) {
      Section s(*p, "config.prune");
      s.get("enabled", c.prune.enabled);
      s.get("sparsity", c.prune.config.sparsity);
      s.get_enum("scope", c.prune.config.scope, prune_scope_from_string);
      if (const json* th = s.child("loss_threshold"); th && !th->is_null()) {
        require<ConfigError>(th->is_number(), "config.prune.loss_threshold: expected a number or null");
        c.prune.config.loss_threshold = th->get<double>();
      }
      s.get("sweep_levels", c.prune.sweep_levels);
    }
    if (const json* e = root.child("eval")) {
      Section s(*e, "config.eval");
      s.get_enum("area_method", c.eval_area.method, area_method_from_string);
      s.get("area_samples", c.eval_area.samples);
    }
  }
  c.train.adjacency_policy = c.dataset.adjacency_policy;
  const auto seeds = c.seeds();
  c.train.seed = seeds.init;
  c.dataset.oracle.area.seed = seeds.area;
  c.eval_area.seed = seeds.area;

  zoo_model(c.model);
  require<ConfigError>(c.train.epochs >= 1, "config.train.epochs must be >= 1");
  require<ConfigError>(c.train.learning_rate >= 0.0, "config.train.learning_rate must be >= 0");
  require<ConfigError>(c.train_fraction > 0.0 && c.train_fraction < 1.0, "config.split.train_fraction must lie in (0, 1)");
  require<ConfigError>(c.federated.workers >= 1 && c.federated.rounds >= 1,
                       "config.federated: workers and rounds must be >= 1");
  require<ConfigError>(c.prune.config.sparsity >= 0.0 && c.prune.config.sparsity <= 1.0,
                       "config.prune.sparsity must lie in [0, 1]");
  require<ConfigError>(c.prune.config.loss_threshold >= 0.0, "config.prune.loss_threshold must be >= 0");
  for (double rho : c.prune.sweep_levels)
    require<ConfigError>(rho >= 0.0 && rho <= 1.0, "config.prune.sweep_levels must lie in [0, 1]");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  try {
    return config_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': malformed JSON: " + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  const auto seeds = c.seeds();
  const auto& p = c.prune.config;
  return json{
      {"schema_version", kSchemaVersion},
      {"name", c.name},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"model", c.model},
      {"mode", c.mode == TrainMode::standalone ? "standalone" : "federated"},
      {"dataset",
       {{"num_graphs", c.dataset.num_graphs},
        {"nodes_per_graph", c.dataset.nodes_per_graph},
        {"area_bounds", {c.dataset.area_bounds.width, c.dataset.area_bounds.height}},
        {"adjacency_policy", to_string(c.dataset.adjacency_policy)},
        {"oracle", to_string(c.dataset.oracle.kind)},
        {"area_method", to_string(c.dataset.oracle.area.method)},
        {"area_samples", c.dataset.oracle.area.samples},
        {"local_search_iters", c.dataset.oracle.local_search_iters}}},
      {"split", {{"train_fraction", c.train_fraction}}},
      {"train",
       {{"epochs", c.train.epochs},
        {"learning_rate", c.train.learning_rate},
        {"optimizer", to_string(c.train.optimizer)},
        {"eval_every", c.train.eval_every}}},
      {"federated",
       {{"workers", c.federated.workers},
        {"shard_size", c.federated.shard_size},
        {"rounds", c.federated.rounds},
        {"local_epochs_per_round", c.federated.local_epochs_per_round},
        {"optimizer_state", to_string(c.federated.state_policy)}}},
      {"prune",
       {{"enabled", c.prune.enabled},
        {"sparsity", p.sparsity},
        {"scope", to_string(p.scope)},
        {"loss_threshold", std::isinf(p.loss_threshold) ? json(nullptr) : json(p.loss_threshold)},
        {"sweep_levels", c.prune.sweep_levels}}},
      {"eval", {{"area_method", to_string(c.eval_area.method)}, {"area_samples", c.eval_area.samples}}},
      {"derived_seeds",
       {{"dataset", seeds.dataset},
        {"split", seeds.split},
        {"init", seeds.init},
        {"partition", seeds.partition},
        {"area", seeds.area}}},
  };
}

std::string config_help() {
  return R"(Config file (JSON, every field optional):
  schema_version        1
  name                  run name; outputs go to <output_dir>/<name>-seed<seed>
  seed                  master seed; dataset, split, init, partition and area seeds derive from it
  output_dir            root directory for run outputs (default "runs")
  model                 mlp | gcn1 | gcn2 | gcn3 | hybrid
  mode                  standalone | federated
  dataset.num_graphs    graphs to generate (default 200)
  dataset.nodes_per_graph  nodes per graph (default 5)
  dataset.area_bounds   [width, height] in meters (default [100, 100])
  dataset.adjacency_policy  message-passing graph: mst | complete (default mst)
  dataset.oracle        brute_force | local_search | mst (default brute_force)
  dataset.area_method   area method inside the oracle: grid | monte_carlo (default grid)
  dataset.area_samples  area samples per evaluation (default 65536)
  dataset.local_search_iters  swap iterations for local_search (default 100)
  split.train_fraction  training share (default 0.8)
  train.epochs          full-batch epochs (default 1000)
  train.learning_rate   step size (default 0.01)
  train.optimizer       adam | sgd
  train.eval_every      test metrics every k epochs, 0 = never (default 1)
  federated.workers     K (default 6)
  federated.shard_size  graphs per worker (default 25)
  federated.rounds      T (default 150)
  federated.local_epochs_per_round  (default 5)
  federated.optimizer_state  reset | persist (default reset)
  prune.enabled         prune the trained model and validate it
  prune.sparsity        fraction of weights zeroed (default 0.3)
  prune.scope           global_rank | per_layer
  prune.loss_threshold  maximum accepted MAE increase, null = unbounded
  prune.sweep_levels    sparsity levels for sweep.csv, e.g. [0, 0.1, 0.3]
  eval.area_method      grid | monte_carlo (default grid)
  eval.area_samples     (default 65536)
)";
}

Dataset build_dataset(const ExperimentConfig& config, bool labeled) {
  const auto& d = config.dataset;
  Dataset ds = generate(d.num_graphs, d.nodes_per_graph, d.area_bounds, config.seeds().dataset, d.adjacency_policy);
  return labeled ? label(ds, d.oracle) : ds;
}

FedConfig fed_config(const ExperimentConfig& c) {
  FedConfig f;
  f.workers = c.federated.workers;
  f.rounds = c.federated.rounds;
  f.local_epochs_per_round = c.federated.local_epochs_per_round;
  f.seed = c.train.seed;
  f.model = zoo_model(c.model);
  f.learning_rate = c.train.learning_rate;
  f.optimizer = c.train.optimizer;
  f.adjacency_policy = c.train.adjacency_policy;
  f.state_policy = c.federated.state_policy;
  return f;
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw StageError(name, e.what(), true);
  } catch (const ConfigError& e) {
    throw StageError(name, e.what(), true);
  } catch (const SearchBudgetExceeded& e) {
    throw StageError(name, e.what(), true);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), false);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult out;
  out.run_dir = config.run_dir();
  const std::filesystem::path dir(out.run_dir);
  auto path = [&](const char* file) { return (dir / file).string(); };
  const auto seeds = config.seeds();
  const ModelSpec spec = stage("config", [&] { return zoo_model(config.model); });

  stage("config", [&] { write_file(path("config.json"), config_to_json(config).dump(2) + "\n"); });
  const Dataset ds = stage("generate", [&] { return build_dataset(config, false); });
  const Dataset labeled = stage("label", [&] { return label(ds, config.dataset.oracle); });
  stage("label", [&] { save_dataset(path("dataset.jsonl"), labeled); });
  const SplitSpec sp = stage("split", [&] { return split(labeled, config.train_fraction, seeds.split); });
  stage("split", [&] { write_file(path("split.json"), split_to_json(sp)); });

  ParamSet params;
  if (config.mode == TrainMode::standalone) {
    auto result = stage("train", [&] { return train_standalone(spec, labeled, sp, config.train); });
    params = std::move(result.params);
    out.curve = std::move(result.curve);
    stage("train", [&] { write_file(path("curve.csv"), curve_to_csv(out.curve)); });
  } else {
    const auto part = stage("partition", [&] {
      return partition(sp, config.federated.workers, config.federated.shard_size, seeds.partition);
    });
    stage("partition", [&] { write_file(path("partition.json"), partition_to_json(part)); });
    auto result = stage("train-fed", [&] { return run_federated(fed_config(config), labeled, sp, part); });
    params = std::move(result.params);
    out.rounds = std::move(result.rounds);
    stage("train-fed", [&] { write_file(path("rounds.jsonl"), rounds_to_jsonl(out.rounds)); });
  }
  stage("train", [&] {
    save_checkpoint(path("checkpoint.json"), Checkpoint{spec, params, std::nullopt, config_to_json(config)});
  });

  if (config.prune.enabled) {
    stage("prune", [&] {
      const auto pruned = prune_by_magnitude(params, config.prune.config);
      out.prune_validation =
          validate_prune(params, pruned, spec, labeled, sp.test_ids, config.prune.config.loss_threshold);
      write_file(path("prune.json"), validation_to_json(*out.prune_validation, pruned, config.prune.config));
      save_checkpoint(path("pruned_checkpoint.json"), Checkpoint{spec, pruned.params, std::nullopt, config_to_json(config)});
    });
  }
  if (!config.prune.sweep_levels.empty()) {
    stage("sweep", [&] {
      out.sweep = sparsity_sweep(params, spec, labeled, sp.test_ids, config.prune.sweep_levels, config.prune.config.scope);
      write_file(path("sweep.csv"), sweep_to_csv(out.sweep));
    });
  }

  stage("evaluate", [&] {
    out.train_report = evaluate(spec, params, labeled, ascending(sp.train_ids), SplitKind::train, config.eval_area);
    out.test_report = evaluate(spec, params, labeled, ascending(sp.test_ids), SplitKind::test, config.eval_area);
    write_file(path("report_train.json"), report_to_json(out.train_report));
    write_file(path("report_test.json"), report_to_json(out.test_report));
  });
  return out;
}

}  // namespace covertnet
