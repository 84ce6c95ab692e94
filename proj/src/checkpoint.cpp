#include "covertnet/checkpoint.hpp"

#include "covertnet/dataset.hpp"
#include "covertnet/error.hpp"
#include "covertnet/io.hpp"

namespace covertnet {

using json = nlohmann::ordered_json;

json params_to_json(const ParamSet& params) {
  json out = json::object();
  for (const auto& [name, t] : params) {
    std::vector<double> values(t.values().begin(), t.values().end());
    out[name] = json{{"shape", {t.rows(), t.cols()}}, {"values", std::move(values)}};
  }
  return out;
}

ParamSet params_from_json(const json& j) {
  ParamSet p;
  for (const auto& [name, entry] : j.items()) {
    const auto rows = entry.at("shape").at(0).get<std::size_t>();
    const auto cols = entry.at("shape").at(1).get<std::size_t>();
    p.insert(name, Tensor(rows, cols, entry.at("values").get<std::vector<double>>()));
  }
  return p;
}

json model_spec_to_json(const ModelSpec& spec) {
  json layers = json::array();
  for (const auto& l : spec.layers)
    layers.push_back({{"kind", to_string(l.kind)},
                      {"in_dim", l.in_dim},
                      {"out_dim", l.out_dim},
                      {"activation", to_string(l.activation)}});
  return json{{"name", spec.name}, {"layers", std::move(layers)}};
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec spec;
  spec.name = j.at("name").get<std::string>();
  for (const auto& l : j.at("layers"))
    spec.layers.push_back({layer_kind_from_string(l.at("kind").get<std::string>()), l.at("in_dim").get<std::size_t>(),
                           l.at("out_dim").get<std::size_t>(),
                           activation_from_string(l.at("activation").get<std::string>())});
  spec.validate();
  return spec;
}

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json j{{"schema_version", kSchemaVersion},
         {"model_spec", model_spec_to_json(ckpt.model_spec)},
         {"params", params_to_json(ckpt.params)}};
  if (ckpt.optimizer_state)
    j["optimizer_state"] = json{{"step", ckpt.optimizer_state->step},
                                {"first_moment", params_to_json(ckpt.optimizer_state->first_moment)},
                                {"second_moment", params_to_json(ckpt.optimizer_state->second_moment)}};
  else
    j["optimizer_state"] = nullptr;
  j["config"] = ckpt.config;
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw InvalidInput("checkpoint: unsupported schema version");
    Checkpoint c;
    c.model_spec = model_spec_from_json(j.at("model_spec"));
    c.params = params_from_json(j.at("params"));
    check_params(c.model_spec, c.params);
    if (j.contains("optimizer_state") && !j.at("optimizer_state").is_null()) {
      const auto& s = j.at("optimizer_state");
      c.optimizer_state = OptimizerState{s.at("step").get<std::uint64_t>(), params_from_json(s.at("first_moment")),
                                         params_from_json(s.at("second_moment"))};
    }
    if (j.contains("config")) c.config = j.at("config");
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("checkpoint: malformed JSON: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) { write_file(path, checkpoint_to_json(ckpt)); }

Checkpoint load_checkpoint(const std::string& path) { return checkpoint_from_json(read_file(path)); }

}  // namespace covertnet
