#include "covertnet/optimizer.hpp"

#include <cmath>
#include <string>

#include "covertnet/error.hpp"

namespace covertnet {

std::string_view to_string(OptimizerKind k) noexcept { return k == OptimizerKind::adam ? "adam" : "sgd"; }

OptimizerKind optimizer_from_string(std::string_view s) {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "sgd") return OptimizerKind::sgd;
  throw ConfigError("unknown optimizer '" + std::string(s) + "'");
}

void optimizer_step(ParamSet& params, const GradSet& grads, OptimizerState& state, const OptimizerConfig& config) {
  if (!params.congruent(grads)) throw InvalidInput("optimizer_step: gradients not congruent with parameters");
  ++state.step;
  if (config.kind == OptimizerKind::sgd) {
    auto g = grads.begin();
    for (auto& [name, p] : params) {
      const Tensor& gt = (g++)->second;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= config.learning_rate * gt[i];
    }
    return;
  }

  if (state.first_moment.empty()) {
    state.first_moment = params.zeros_like();
    state.second_moment = params.zeros_like();
  }
  if (!state.first_moment.congruent(params)) throw InvalidInput("optimizer_step: state not congruent with parameters");
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  auto g = grads.begin();
  auto m = state.first_moment.begin();
  auto v = state.second_moment.begin();
  for (auto& [name, p] : params) {
    const Tensor& gt = (g++)->second;
    Tensor& mt = (m++)->second;
    Tensor& vt = (v++)->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      mt[i] = config.beta1 * mt[i] + (1.0 - config.beta1) * gt[i];
      vt[i] = config.beta2 * vt[i] + (1.0 - config.beta2) * gt[i] * gt[i];
      p[i] -= config.learning_rate * (mt[i] / c1) / (std::sqrt(vt[i] / c2) + config.epsilon);
    }
  }
}

}  // namespace covertnet
