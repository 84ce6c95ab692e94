// Command-line front end for the coverage-radius pipeline.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covertnet/checkpoint.hpp"
#include "covertnet/error.hpp"
#include "covertnet/experiment.hpp"
#include "covertnet/io.hpp"

namespace fs = std::filesystem;
using namespace covertnet;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dataset;
  std::string split;
  std::string checkpoint;
  std::vector<std::string> reports;
  std::string which = "test";
};

ExperimentConfig load(const Common& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (!c.config_path.empty()) {
    try {
      j = nlohmann::ordered_json::parse(read_file(c.config_path));
    } catch (const nlohmann::ordered_json::exception& e) {
      throw ConfigError("config '" + c.config_path + "': malformed JSON: " + e.what());
    }
  }
  if (c.seed) j["seed"] = *c.seed;
  return config_from_json(j);
}

std::string out_or(const Common& c, const ExperimentConfig& cfg, const char* file) {
  return c.out.empty() ? (fs::path(cfg.run_dir()) / file).string() : c.out;
}

std::string sibling(const std::string& path, const char* file) {
  return (fs::path(path).parent_path() / file).string();
}

void require_flag(const std::string& value, const char* flag) {
  if (value.empty()) throw InvalidInput(std::string("missing required option ") + flag);
}

Dataset labeled_dataset(const Common& c) {
  require_flag(c.dataset, "--dataset");
  Dataset ds = load_dataset(c.dataset);
  if (!ds.labeled()) throw InvalidInput("dataset '" + c.dataset + "' is not labeled");
  return ds;
}

SplitSpec load_split(const Common& c) {
  require_flag(c.split, "--split");
  return split_from_json(read_file(c.split));
}

Checkpoint checkpoint_in(const Common& c) {
  require_flag(c.checkpoint, "--checkpoint");
  return load_checkpoint(c.checkpoint);
}

std::vector<std::uint64_t> eval_ids(const Common& c, const SplitSpec& sp) {
  return ascending(split_kind_from_string(c.which) == SplitKind::train ? sp.train_ids : sp.test_ids);
}

int cmd_gen(const Common& c) {
  const auto cfg = load(c);
  const auto path = out_or(c, cfg, "dataset.jsonl");
  save_dataset(path, build_dataset(cfg, false));
  std::cout << path << "\n";
  return kOk;
}

int cmd_label(const Common& c) {
  const auto cfg = load(c);
  require_flag(c.dataset, "--dataset");
  const auto path = out_or(c, cfg, "dataset.jsonl");
  save_dataset(path, label(load_dataset(c.dataset), cfg.dataset.oracle));
  std::cout << path << "\n";
  return kOk;
}

int cmd_split(const Common& c) {
  const auto cfg = load(c);
  require_flag(c.dataset, "--dataset");
  const auto path = out_or(c, cfg, "split.json");
  write_file(path, split_to_json(split(load_dataset(c.dataset), cfg.train_fraction, cfg.seeds().split)));
  std::cout << path << "\n";
  return kOk;
}

int cmd_train(const Common& c) {
  const auto cfg = load(c);
  const auto ds = labeled_dataset(c);
  const auto sp = load_split(c);
  const auto spec = zoo_model(cfg.model);
  const auto path = out_or(c, cfg, "checkpoint.json");
  const auto result = train_standalone(spec, ds, sp, cfg.train);
  save_checkpoint(path, {spec, result.params, std::nullopt, config_to_json(cfg)});
  write_file(sibling(path, "curve.csv"), curve_to_csv(result.curve));
  std::cout << path << "\n";
  return kOk;
}

int cmd_train_fed(const Common& c) {
  const auto cfg = load(c);
  const auto ds = labeled_dataset(c);
  const auto sp = load_split(c);
  const auto path = out_or(c, cfg, "checkpoint.json");
  const auto part = partition(sp, cfg.federated.workers, cfg.federated.shard_size, cfg.seeds().partition);
  const auto fed = fed_config(cfg);
  const auto result = run_federated(fed, ds, sp, part);
  save_checkpoint(path, {fed.model, result.params, std::nullopt, config_to_json(cfg)});
  write_file(sibling(path, "partition.json"), partition_to_json(part));
  write_file(sibling(path, "rounds.jsonl"), rounds_to_jsonl(result.rounds));
  std::cout << path << "\n";
  return kOk;
}

int cmd_prune(const Common& c) {
  const auto cfg = load(c);
  const auto ckpt = checkpoint_in(c);
  const auto ds = labeled_dataset(c);
  const auto sp = load_split(c);
  const auto path = out_or(c, cfg, "pruned_checkpoint.json");
  const auto pruned = prune_by_magnitude(ckpt.params, cfg.prune.config);
  const auto v = validate_prune(ckpt.params, pruned, ckpt.model_spec, ds, eval_ids(c, sp),
                                cfg.prune.config.loss_threshold);
  save_checkpoint(path, {ckpt.model_spec, pruned.params, std::nullopt, config_to_json(cfg)});
  const auto summary = validation_to_json(v, pruned, cfg.prune.config);
  write_file(sibling(path, "prune.json"), summary);
  std::cout << summary;
  return kOk;
}

int cmd_sweep(const Common& c) {
  const auto cfg = load(c);
  const auto ckpt = checkpoint_in(c);
  const auto ds = labeled_dataset(c);
  const auto sp = load_split(c);
  auto levels = cfg.prune.sweep_levels;
  if (levels.empty()) levels = {0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
  const auto rows = sparsity_sweep(ckpt.params, ckpt.model_spec, ds, eval_ids(c, sp), levels, cfg.prune.config.scope);
  const auto csv = sweep_to_csv(rows);
  if (c.out.empty()) {
    std::cout << csv;
  } else {
    write_file(c.out, csv);
    std::cout << c.out << "\n";
  }
  return kOk;
}

int cmd_eval(const Common& c) {
  const auto cfg = load(c);
  const auto ckpt = checkpoint_in(c);
  const auto ds = labeled_dataset(c);
  const auto sp = load_split(c);
  const auto kind = split_kind_from_string(c.which);
  const auto report = evaluate(ckpt.model_spec, ckpt.params, ds, eval_ids(c, sp), kind, cfg.eval_area);
  const auto text = report_to_json(report);
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_file(c.out, text);
    std::cout << c.out << "\n";
  }
  return kOk;
}

int cmd_compare(const Common& c) {
  std::vector<MetricsReport> reports;
  for (const auto& p : c.reports) reports.push_back(report_from_json(read_file(p)));
  const auto csv = comparison_to_csv(compare(std::move(reports)));
  if (c.out.empty()) {
    std::cout << csv;
  } else {
    write_file(c.out, csv);
    std::cout << c.out << "\n";
  }
  return kOk;
}

int cmd_run(const Common& c) {
  auto cfg = load(c);
  if (!c.out.empty()) cfg.output_dir = c.out;
  const auto result = run_experiment(cfg);
  std::cout << result.run_dir << "\n"
            << "train mae " << format_double(result.train_report.mae) << " medae "
            << format_double(result.train_report.medae) << "\n"
            << "test mae " << format_double(result.test_report.mae) << " medae "
            << format_double(result.test_report.medae) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-radius prediction with graph neural networks"};
  app.footer(config_help());
  app.require_subcommand(1);

  Common c;
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Common&);
  };
  const std::vector<Cmd> cmds = {
      {"gen", "generate an unlabeled dataset", cmd_gen},
      {"label", "label a dataset with the configured oracle", cmd_label},
      {"split", "split a dataset into train and test ids", cmd_split},
      {"train", "train a zoo model on one dataset", cmd_train},
      {"train-fed", "federated training over worker shards", cmd_train_fed},
      {"prune", "magnitude-prune a checkpoint and validate it", cmd_prune},
      {"sweep", "test error across sparsity levels", cmd_sweep},
      {"eval", "evaluate a checkpoint on one split", cmd_eval},
      {"compare", "rank metrics reports", cmd_compare},
      {"run", "full pipeline from one config", cmd_run},
  };

  std::uint64_t seed = 0;
  int (*chosen)(const Common&) = nullptr;
  for (const auto& cmd : cmds) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", c.config_path, "experiment config (JSON)");
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--out", c.out, "output path");
    if (std::string_view(cmd.name) == "compare") {
      sub->add_option("--reports", c.reports, "report files")->required()->expected(2, -1);
    } else if (std::string_view(cmd.name) != "gen" && std::string_view(cmd.name) != "run") {
      sub->add_option("--dataset", c.dataset, "dataset file (JSONL)");
      sub->add_option("--split", c.split, "split file");
      sub->add_option("--checkpoint", c.checkpoint, "checkpoint file");
      sub->add_option("--which", c.which, "split to score: train | test")->check(CLI::IsMember({"train", "test"}));
    }
    sub->callback([&chosen, &c, &seed, sub, fn = cmd.fn] {
      chosen = fn;
      if (sub->count("--seed") > 0) c.seed = seed;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    return chosen(c);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? kValidation : kRuntime;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const SearchBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
