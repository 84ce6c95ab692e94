#pragma once

#include <cstdint>
#include <string_view>

#include "covertnet/params.hpp"

namespace covertnet {

enum class OptimizerKind { adam, sgd };

std::string_view to_string(OptimizerKind k) noexcept;
OptimizerKind optimizer_from_string(std::string_view s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates for the adaptive rule; unused by plain descent.
struct OptimizerState {
  std::uint64_t step = 0;
  ParamSet first_moment;
  ParamSet second_moment;
};

/// One update in place. Throws InvalidInput when grads are not congruent with params.
void optimizer_step(ParamSet& params, const GradSet& grads, OptimizerState& state, const OptimizerConfig& config);

}  // namespace covertnet
