#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "covertnet/error.hpp"
#include "covertnet/experiment.hpp"
#include "covertnet/io.hpp"
#include "covertnet/random.hpp"

using namespace covertnet;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("covertnet-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json small_config(const fs::path& out) {
  return json{{"name", "small"},
              {"seed", 5},
              {"output_dir", out.string()},
              {"model", "gcn2"},
              {"dataset", {{"num_graphs", 10}, {"area_samples", 16384}}},
              {"train", {{"epochs", 15}}},
              {"eval", {{"area_samples", 16384}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(COVERTNET_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsAndDerivedSeeds) {
  const auto c = config_from_json(json::object());
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.dataset.num_graphs, 200u);
  EXPECT_EQ(c.train.epochs, 1000u);
  EXPECT_EQ(c.federated.workers, 6u);
  EXPECT_EQ(c.train.seed, substream_seed(7, 2));
  EXPECT_EQ(c.eval_area.seed, substream_seed(7, 4));
  const auto s = derive_seeds(7);
  EXPECT_EQ(s.dataset, 7u);
  EXPECT_NE(s.split, s.init);
  EXPECT_NE(s.partition, s.area);
  EXPECT_EQ(c.run_dir(), (fs::path("runs") / "experiment-seed7").string());
}

TEST(Config, EchoRoundTrips) {
  auto j = small_config("out");
  j["prune"] = {{"enabled", true}, {"sparsity", 0.2}, {"loss_threshold", 1.5}, {"sweep_levels", {0.0, 0.5}}};
  j["mode"] = "federated";
  const auto c = config_from_json(j);
  auto echo = config_to_json(c);
  EXPECT_TRUE(echo.contains("derived_seeds"));
  echo.erase("derived_seeds");
  EXPECT_EQ(config_to_json(config_from_json(echo)).dump(), config_to_json(c).dump());
  EXPECT_EQ(c.prune.config.loss_threshold, 1.5);
  EXPECT_EQ(c.mode, TrainMode::federated);
}

TEST(Config, StrictParse) {
  EXPECT_THROW(config_from_json(json{{"sed", 3}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"train", {{"epoch", 3}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"model", "gcn9"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"seed", "seven"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"split", {{"train_fraction", 1.0}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"prune", {{"sparsity", 1.5}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"dataset", {{"oracle", "oracle"}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"schema_version", 2}}), ConfigError);
  EXPECT_THROW(config_from_json(json::array()), ConfigError);
}

TEST(Config, LoadFile) {
  const auto dir = scratch("load");
  write_file((dir / "good.json").string(), small_config(dir).dump());
  write_file((dir / "bad.json").string(), "{ not json");
  EXPECT_EQ(load_config((dir / "good.json").string()).name, "small");
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
}

TEST(Experiment, ByteReproducible) {
  const auto dir = scratch("repro");
  const auto config = config_from_json(small_config(dir));
  const auto ra = run_experiment(config);
  const fs::path run(ra.run_dir);
  const std::vector<std::string> files{"config.json",      "dataset.jsonl",     "split.json",
                                       "checkpoint.json",  "curve.csv",         "report_train.json",
                                       "report_test.json"};
  std::vector<std::string> first;
  for (const auto& f : files) {
    ASSERT_TRUE(fs::exists(run / f)) << f;
    first.push_back(slurp(run / f));
  }
  fs::remove_all(run);
  const auto rb = run_experiment(config);
  for (std::size_t k = 0; k < files.size(); ++k) EXPECT_EQ(slurp(run / files[k]), first[k]) << files[k];
  EXPECT_EQ(ra.curve.size(), 15u);
  EXPECT_EQ(ra.test_report.n_samples, 2u);
  EXPECT_EQ(ra.train_report.n_samples, 8u);
  EXPECT_EQ(report_to_json(ra.test_report), report_to_json(rb.test_report));
}

TEST(Experiment, SeedChangesOutputs) {
  const auto dir = scratch("seeds");
  auto j = small_config(dir);
  const auto a = run_experiment(config_from_json(j));
  j["seed"] = 6;
  const auto b = run_experiment(config_from_json(j));
  EXPECT_NE(a.run_dir, b.run_dir);
  EXPECT_NE(slurp(fs::path(a.run_dir) / "dataset.jsonl"), slurp(fs::path(b.run_dir) / "dataset.jsonl"));
}

TEST(Experiment, FederatedWithPruneAndSweep) {
  const auto dir = scratch("fed");
  auto j = small_config(dir);
  j["mode"] = "federated";
  j["dataset"]["num_graphs"] = 12;
  j["federated"] = {{"workers", 2}, {"shard_size", 4}, {"rounds", 3}, {"local_epochs_per_round", 2}};
  j["prune"] = {{"enabled", true}, {"sparsity", 0.3}, {"sweep_levels", {0.0, 0.1, 0.3, 0.5, 0.7, 0.9}}};
  const auto r = run_experiment(config_from_json(j));
  EXPECT_EQ(r.rounds.size(), 3u);
  ASSERT_TRUE(r.prune_validation.has_value());
  EXPECT_EQ(r.sweep.size(), 6u);
  const fs::path run(r.run_dir);
  for (const char* file : {"rounds.jsonl", "partition.json", "prune.json", "pruned_checkpoint.json", "sweep.csv"})
    EXPECT_TRUE(fs::exists(run / file)) << file;
  EXPECT_FALSE(fs::exists(run / "curve.csv"));
  const auto csv = slurp(run / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Experiment, ErrorsCarryStage) {
  const auto dir = scratch("stage");
  auto j = small_config(dir);
  j["mode"] = "federated";
  j["federated"] = {{"workers", 3}, {"shard_size", 10}};
  try {
    run_experiment(config_from_json(j));
    FAIL() << "expected a StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "partition");
    EXPECT_TRUE(e.is_validation());
  }
  auto k = small_config(dir);
  k["dataset"]["nodes_per_graph"] = 9;
  try {
    run_experiment(config_from_json(k));
    FAIL() << "expected a StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "label");
  }
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const auto cfg = (dir / "config.json").string();
  write_file(cfg, small_config(dir).dump());
  write_file((dir / "bad.json").string(), json{{"unknown", 1}}.dump());
  write_file((dir / "blocker").string(), "");
  const auto ds = (dir / "ds.jsonl").string();
  const auto sp = (dir / "split.json").string();
  const auto ck = (dir / "ck.json").string();
  const auto rep = (dir / "rep.json").string();

  EXPECT_EQ(run_cli("gen --config " + cfg + " --out " + ds), 0);
  EXPECT_EQ(run_cli("label --config " + cfg + " --dataset " + ds + " --out " + ds), 0);
  EXPECT_EQ(run_cli("split --config " + cfg + " --dataset " + ds + " --out " + sp), 0);
  EXPECT_EQ(run_cli("train --config " + cfg + " --dataset " + ds + " --split " + sp + " --out " + ck), 0);
  EXPECT_EQ(run_cli("eval --config " + cfg + " --dataset " + ds + " --split " + sp + " --checkpoint " + ck +
                    " --out " + rep),
            0);
  EXPECT_EQ(run_cli("compare --reports " + rep + " " + rep), 0);
  EXPECT_EQ(run_cli("--help"), 0);

  EXPECT_EQ(run_cli("train --config " + cfg + " --split " + sp), 1);
  EXPECT_EQ(run_cli("gen --config " + (dir / "bad.json").string()), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("eval --config " + cfg + " --dataset " + ds + " --split " + sp + " --checkpoint " + ck +
                    " --which val"),
            1);
  EXPECT_EQ(run_cli("gen --config " + cfg + " --out " + (dir / "blocker" / "ds.jsonl").string()), 2);
}
