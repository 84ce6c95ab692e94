#include <gtest/gtest.h>

#include <algorithm>

#include "covertnet/error.hpp"
#include "covertnet/fedlearn.hpp"
#include "covertnet/metrics.hpp"

using namespace covertnet;

namespace {

const Dataset& fed_dataset() {
  static const Dataset ds = label(generate(30, 5, {100, 100}, 41), {});
  return ds;
}

ParamSet scalar_set(double v) {
  ParamSet p;
  p.insert("w", Tensor(1, 1, v));
  return p;
}

FedConfig config_for(const char* model, std::size_t workers, std::size_t rounds, std::size_t local) {
  FedConfig c;
  c.workers = workers;
  c.rounds = rounds;
  c.local_epochs_per_round = local;
  c.seed = 3;
  c.model = zoo_model(model);
  c.learning_rate = 1e-2;
  c.adjacency_policy = fed_dataset().adjacency_policy;
  return c;
}

}  // namespace

TEST(Aggregate, Examples) {
  const auto p = init_params(zoo_model("hybrid"), 1);
  const auto same = aggregate({p, p, p});
  for (const auto& [name, t] : p)
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(same.at(name)[i], t[i], 1e-15) << name;
  auto neg = p;
  neg *= -1.0;
  EXPECT_EQ(aggregate({p, neg}), p.zeros_like());
  EXPECT_EQ(aggregate({scalar_set(1), scalar_set(2), scalar_set(6)}).at("w").item(), 3.0);
}

TEST(Aggregate, Errors) {
  EXPECT_THROW(aggregate({}), InvalidInput);
  ParamSet other;
  other.insert("v", Tensor(1, 1));
  EXPECT_THROW(aggregate({scalar_set(1), other}), InvalidInput);
}

TEST(Aggregate, IdentityOnOneWorkerAndNearPermutationInvariant) {
  const auto a = init_params(zoo_model("gcn2"), 1);
  const auto b = init_params(zoo_model("gcn2"), 2);
  const auto c = init_params(zoo_model("gcn2"), 3);
  EXPECT_EQ(aggregate({a}), a);
  const auto x = aggregate({a, b, c});
  const auto y = aggregate({c, a, b});
  for (const auto& [name, t] : x)
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(t[i], y.at(name)[i], 1e-15);
  EXPECT_EQ(x, aggregate({a, b, c}));
}

TEST(LocalTrain, NoEpochsOrZeroRate) {
  const auto& ds = fed_dataset();
  const auto spec = zoo_model("gcn2");
  const auto global = init_params(spec, 1);
  const auto shard = prepare(ds, {0, 1, 2});
  WorkerState w;
  EXPECT_EQ(local_train(w, global, 0, spec, shard, {}, OptimizerStatePolicy::reset), global);
  EXPECT_EQ(local_train(w, global, 5, spec, shard, {OptimizerKind::adam, 0.0}, OptimizerStatePolicy::reset), global);
  EXPECT_EQ(local_train(w, global, 5, spec, shard, {OptimizerKind::sgd, 0.0}, OptimizerStatePolicy::persist), global);
}

TEST(LocalTrain, ShapeMismatch) {
  const auto& ds = fed_dataset();
  const auto shard = prepare(ds, {0});
  WorkerState w;
  w.params = init_params(zoo_model("gcn2"), 1);
  EXPECT_THROW(local_train(w, init_params(zoo_model("gcn3"), 1), 1, zoo_model("gcn2"), shard, {},
                           OptimizerStatePolicy::reset),
               InvalidInput);
}

TEST(LocalTrain, OverfitSingleSample) {
  const auto ds = label(generate(2, 5, {100, 100}, 31), {});
  const auto spec = zoo_model("gcn2");
  const auto shard = prepare(ds, {1});
  WorkerState w;
  const auto p = local_train(w, init_params(spec, 0), 4000, spec, shard, {OptimizerKind::adam, 3e-3},
                             OptimizerStatePolicy::reset);
  double mean = 0.0;
  for (double r : ds.samples[1].labels->radii) mean += r;
  mean /= 5.0;
  EXPECT_LT(mae(predict(spec, p, shard[0]), ds.samples[1].labels->radii), 1e-2 * mean);
}

TEST(Federated, RoundHistoryAndDeterminism) {
  const auto& ds = fed_dataset();
  const auto sp = split(ds, 0.8, 1);
  const auto part = partition(sp, 3, 6, 2);
  const auto cfg = config_for("hybrid", 3, 4, 2);
  const auto a = run_federated(cfg, ds, sp, part);
  const auto b = run_federated(cfg, ds, sp, part);
  ASSERT_EQ(a.rounds.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(a.rounds[t].round, t + 1);
    EXPECT_EQ(a.rounds[t].per_worker_train_loss.size(), 3u);
  }
  EXPECT_EQ(a.rounds.back().global_params_digest, digest(a.params));
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(rounds_to_jsonl(a.rounds), rounds_to_jsonl(b.rounds));
  const auto e = error_summary(cfg.model, a.params, prepare(ds, ascending(sp.test_ids)));
  EXPECT_EQ(a.rounds.back().global_test_mae, e.mae);
}

TEST(Federated, ScheduleIndependent) {
  const auto& ds = fed_dataset();
  const auto sp = split(ds, 0.8, 1);
  const auto part = partition(sp, 4, 5, 2);
  const auto cfg = config_for("gcn2", 4, 3, 2);
  setenv("COVERTNET_THREADS", "1", 1);
  const auto serial = run_federated(cfg, ds, sp, part);
  setenv("COVERTNET_THREADS", "4", 1);
  const auto threaded = run_federated(cfg, ds, sp, part);
  unsetenv("COVERTNET_THREADS");
  EXPECT_EQ(serial.params, threaded.params);
}

TEST(Federated, ProtocolMatchesManualRounds) {
  const auto& ds = fed_dataset();
  const auto sp = split(ds, 0.8, 1);
  const auto part = partition(sp, 2, 5, 4);
  const auto cfg = config_for("gcn2", 2, 3, 2);
  const auto fed = run_federated(cfg, ds, sp, part);
  ParamSet global = init_params(cfg.model, cfg.seed);
  for (int t = 0; t < 3; ++t) {
    std::vector<ParamSet> local;
    for (const auto& shard : part.worker_shards) {
      WorkerState w;
      local.push_back(local_train(w, global, 2, cfg.model, prepare(ds, ascending(shard)), {cfg.optimizer, 1e-2},
                                  OptimizerStatePolicy::reset));
    }
    global = aggregate(local);
  }
  EXPECT_EQ(global, fed.params);
}

TEST(Federated, SingleWorkerMatchesStandalone) {
  const auto& ds = fed_dataset();
  const auto sp = split(ds, 0.8, 1);
  const auto part = partition(sp, 1, sp.train_ids.size(), 0);
  struct Case {
    OptimizerKind opt;
    OptimizerStatePolicy policy;
    std::size_t rounds, local;
  };
  for (const auto& c : {Case{OptimizerKind::sgd, OptimizerStatePolicy::reset, 5, 4},
                        Case{OptimizerKind::adam, OptimizerStatePolicy::persist, 5, 4},
                        Case{OptimizerKind::adam, OptimizerStatePolicy::reset, 20, 1}}) {
    auto cfg = config_for("hybrid", 1, c.rounds, c.local);
    cfg.optimizer = c.opt;
    cfg.state_policy = c.policy;
    if (c.opt == OptimizerKind::sgd) cfg.learning_rate = 1e-4;
    const auto fed = run_federated(cfg, ds, sp, part);
    if (c.local == 1 && c.policy == OptimizerStatePolicy::reset && c.opt == OptimizerKind::adam) {
      // A fresh adaptive state each epoch is not standalone training.
      const TrainConfig tc{c.rounds, cfg.learning_rate, cfg.seed, cfg.optimizer, cfg.adjacency_policy, 0};
      EXPECT_NE(fed.params, train_standalone(cfg.model, ds, sp, tc).params);
      continue;
    }
    const TrainConfig tc{c.rounds * c.local, cfg.learning_rate, cfg.seed, cfg.optimizer, cfg.adjacency_policy, 0};
    const auto solo = train_standalone(cfg.model, ds, sp, tc);
    for (const auto& [name, t] : solo.params)
      for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(fed.params.at(name)[i], t[i], 1e-9) << name;
  }
}

TEST(Federated, Errors) {
  const auto& ds = fed_dataset();
  const auto sp = split(ds, 0.8, 1);
  const auto cfg = config_for("gcn2", 2, 1, 1);
  EXPECT_THROW(run_federated(cfg, ds, sp, PartitionSpec{}), InvalidInput);
  EXPECT_THROW(run_federated(cfg, ds, sp, partition(sp, 3, 2, 0)), InvalidInput);
  PartitionSpec leaky{{{sp.train_ids[0]}, {sp.test_ids[0]}}, 1};
  EXPECT_THROW(run_federated(cfg, ds, sp, leaky), InvalidInput);
}

TEST(Federated, StatePolicyNames) {
  EXPECT_EQ(state_policy_from_string("reset"), OptimizerStatePolicy::reset);
  EXPECT_EQ(state_policy_from_string(to_string(OptimizerStatePolicy::persist)), OptimizerStatePolicy::persist);
  EXPECT_THROW(state_policy_from_string("keep"), ConfigError);
}
