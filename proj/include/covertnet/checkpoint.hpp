#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "covertnet/gnn.hpp"
#include "covertnet/optimizer.hpp"
#include "covertnet/params.hpp"

namespace covertnet {

struct Checkpoint {
  ModelSpec model_spec;
  ParamSet params;
  std::optional<OptimizerState> optimizer_state;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

nlohmann::ordered_json params_to_json(const ParamSet& params);
ParamSet params_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::ordered_json& j);

/// Values are written as shortest round-trip decimals, so reload is bit-exact.
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace covertnet
