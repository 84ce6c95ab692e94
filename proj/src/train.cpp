#include "covertnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "covertnet/error.hpp"
#include "covertnet/io.hpp"
#include "covertnet/metrics.hpp"

namespace covertnet {

std::vector<std::uint64_t> ascending(std::vector<std::uint64_t> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

EpochStats full_batch_step(const ModelSpec& spec, ParamSet& params, std::span<const PreparedSample> samples,
                           OptimizerState& state, const OptimizerConfig& config) {
  if (samples.empty()) throw InvalidInput("training: no samples");
  GradSet total = params.zeros_like();
  std::vector<double> preds;
  std::vector<double> labels;
  double loss = 0.0;
  for (const auto& s : samples) {
    if (s.target.size() == 0) throw InvalidInput("training: sample " + std::to_string(s.id) + " has no labels");
    Tape tape;
    const Var pred = model_forward(tape, spec, bind_params(tape, spec, params), s);
    const Var l = mae_loss(pred, s.target);
    const Tensor& p = pred.value();
    preds.insert(preds.end(), p.values().begin(), p.values().end());
    labels.insert(labels.end(), s.target.values().begin(), s.target.values().end());
    loss += l.value().item();
    tape.backward(l);
    total += tape.gradients(params);
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& [name, g] : total) g *= inv;
  optimizer_step(params, total, state, config);
  return {loss * inv, mae(preds, labels), medae(preds, labels)};
}

TrainResult train_standalone(const ModelSpec& spec, const Dataset& dataset, const SplitSpec& split,
                             const TrainConfig& config) {
  return train_standalone(spec, dataset, split, config, init_params(spec, config.seed));
}

TrainResult train_standalone(const ModelSpec& spec, const Dataset& dataset, const SplitSpec& split,
                             const TrainConfig& config, ParamSet initial) {
  if (!dataset.labeled()) throw InvalidInput("train: dataset is not labeled");
  if (split.train_ids.empty()) throw InvalidInput("train: empty training split");
  if (config.epochs < 1) throw InvalidInput("train: epochs must be >= 1");
  if (!(config.learning_rate >= 0.0)) throw InvalidInput("train: learning rate must be >= 0");
  check_params(spec, initial);

  const Dataset& ds = dataset.adjacency_policy == config.adjacency_policy
                          ? dataset
                          : with_adjacency_policy(dataset, config.adjacency_policy);
  const auto train = prepare(ds, ascending(split.train_ids));
  const auto test = prepare(ds, ascending(split.test_ids));

  TrainResult result{std::move(initial), {}};
  OptimizerState state;
  const auto opt = config.optimizer_config();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto stats = full_batch_step(spec, result.params, train, state, opt);
    CurvePoint pt{epoch, stats.loss, stats.mae, stats.medae, nan, nan};
    const bool eval = config.eval_every != 0 && (epoch % config.eval_every == 0 || epoch == config.epochs);
    if (eval && !test.empty()) {
      const auto e = error_summary(spec, result.params, test);
      pt.test_mae = e.mae;
      pt.test_medae = e.medae;
    }
    result.curve.push_back(pt);
  }
  return result;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os << "epoch,train_loss,train_mae,train_medae,test_mae,test_medae\n";
  auto num = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const auto& p : curve)
    os << p.epoch << ',' << num(p.train_loss) << ',' << num(p.train_mae) << ',' << num(p.train_medae) << ','
       << num(p.test_mae) << ',' << num(p.test_medae) << '\n';
  return os.str();
}

}  // namespace covertnet
