#include "covertnet/gnn.hpp"

#include <cmath>
#include <string>

#include "covertnet/error.hpp"
#include "covertnet/random.hpp"

namespace covertnet {

std::string_view to_string(LayerKind k) noexcept {
  switch (k) {
    case LayerKind::gcn:
      return "gcn";
    case LayerKind::gat:
      return "gat";
    case LayerKind::dense:
      return "dense";
  }
  return "?";
}

std::string_view to_string(Activation a) noexcept { return a == Activation::relu ? "relu" : "identity"; }

LayerKind layer_kind_from_string(std::string_view s) {
  for (auto k : {LayerKind::gcn, LayerKind::gat, LayerKind::dense})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown layer kind '" + std::string(s) + "'");
}

Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

void ModelSpec::validate() const {
  if (layers.empty()) throw InvalidInput("model '" + name + "': no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].in_dim < 1 || layers[i].out_dim < 1)
      throw InvalidInput("model '" + name + "': layer " + std::to_string(i) + " has a zero dimension");
    if (i > 0 && layers[i].in_dim != layers[i - 1].out_dim)
      throw InvalidInput("model '" + name + "': layer " + std::to_string(i) + " input does not match previous output");
  }
  if (layers.back().out_dim != 1) throw InvalidInput("model '" + name + "': final layer must have out_dim 1");
}

bool ModelSpec::uses_message_passing() const {
  for (const auto& l : layers)
    if (l.kind != LayerKind::dense) return true;
  return false;
}

std::string weight_name(std::size_t index) { return "layer" + std::to_string(index) + ".weight"; }
std::string bias_name(std::size_t index) { return "layer" + std::to_string(index) + ".bias"; }

ParamSet init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(substream_seed(seed, 0x1a7e5));
  ParamSet params;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const double bound = std::sqrt(6.0 / static_cast<double>(l.in_dim + l.out_dim));
    Tensor w(l.in_dim, l.out_dim);
    for (auto& v : w.values()) v = rng.uniform(-bound, bound);
    params.insert(weight_name(i), std::move(w));
    params.insert(bias_name(i), Tensor(1, l.out_dim));
  }
  return params;
}

void check_params(const ModelSpec& spec, const ParamSet& params) {
  spec.validate();
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const Tensor* w = params.find(weight_name(i));
    const Tensor* b = params.find(bias_name(i));
    if (!w || w->rows() != l.in_dim || w->cols() != l.out_dim || !b || b->rows() != 1 || b->cols() != l.out_dim)
      throw InvalidInput("parameters do not match model '" + spec.name + "' at layer " + std::to_string(i));
  }
}

Tensor normalised_adjacency(const AdjacencyMatrix& adjacency) {
  const std::size_t n = adjacency.rows();
  if (adjacency.cols() != n || !adjacency.is_symmetric()) throw InvalidInput("gcn: adjacency must be square and symmetric");
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!adjacency(i, i)) throw InvalidInput("gcn: adjacency must carry self-loops");
    std::size_t deg = 0;
    for (std::size_t j = 0; j < n; ++j) deg += adjacency(i, j) ? 1 : 0;
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(deg));
  }
  Tensor a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (adjacency(i, j)) a(i, j) = inv_sqrt_deg[i] * inv_sqrt_deg[j];
  return a;
}

Tensor gcn_forward(const Tensor& h, const Tensor& w, const AdjacencyMatrix& adjacency) {
  if (adjacency.rows() != h.rows()) throw InvalidInput("gcn_forward: adjacency does not match node count");
  return relu(matmul(normalised_adjacency(adjacency), matmul(h, w)));
}

Tensor gat_attention(const Tensor& h, const AdjacencyMatrix& adjacency) {
  if (adjacency.rows() != h.rows() || adjacency.cols() != h.rows())
    throw InvalidInput("gat: adjacency does not match node count");
  return masked_softmax(matmul(h, transpose(h)), adjacency);
}

Tensor gat_forward(const Tensor& h, const Tensor& w, const AdjacencyMatrix& adjacency) {
  return relu(matmul(gat_attention(h, adjacency), matmul(h, w)));
}

PreparedSample prepare(const GraphSample& sample) {
  PreparedSample p;
  p.id = sample.id;
  p.features = sample.features;
  p.adjacency = sample.mp_adjacency;
  p.norm_adjacency = normalised_adjacency(sample.mp_adjacency);
  if (sample.labels) p.target = Tensor::column(sample.labels->radii);
  return p;
}

std::vector<PreparedSample> prepare(const Dataset& dataset, const std::vector<std::uint64_t>& ids) {
  std::vector<PreparedSample> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(prepare(dataset.sample(id)));
  return out;
}

Var model_forward(Tape& tape, const ModelSpec& spec, const std::vector<Var>& params, const PreparedSample& sample) {
  if (params.size() != 2 * spec.layers.size()) throw InvalidInput("model_forward: parameter count does not match spec");
  if (sample.features.cols() != spec.layers.front().in_dim)
    throw InvalidInput("model_forward: feature width does not match model input");
  Var h = tape.constant(sample.features);
  Var norm_adj{};
  bool have_norm_adj = false;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const Var w = params[2 * i];
    const Var b = params[2 * i + 1];
    Var z{};
    switch (l.kind) {
      case LayerKind::dense:
        z = matmul(h, w);
        break;
      case LayerKind::gcn:
        if (!have_norm_adj) {
          norm_adj = tape.constant(sample.norm_adjacency);
          have_norm_adj = true;
        }
        z = matmul(norm_adj, matmul(h, w));
        break;
      case LayerKind::gat: {
        const Var alpha = masked_softmax(matmul(h, transpose(h)), sample.adjacency);
        z = matmul(alpha, matmul(h, w));
        break;
      }
    }
    z = add_row(z, b);
    h = l.activation == Activation::relu ? relu(z) : z;
  }
  return h;
}

std::vector<Var> bind_params(Tape& tape, const ModelSpec& spec, const ParamSet& params) {
  check_params(spec, params);
  std::vector<Var> vars;
  vars.reserve(2 * spec.layers.size());
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    vars.push_back(tape.parameter(weight_name(i), params.at(weight_name(i))));
    vars.push_back(tape.parameter(bias_name(i), params.at(bias_name(i))));
  }
  return vars;
}

std::vector<double> predict(const ModelSpec& spec, const ParamSet& params, const PreparedSample& sample) {
  Tape tape;
  const Var out = model_forward(tape, spec, bind_params(tape, spec, params), sample);
  const auto v = out.value().values();
  return {v.begin(), v.end()};
}

RadiusAssignment model_forward(const ModelSpec& spec, const ParamSet& params, const GraphSample& sample) {
  return {predict(spec, params, prepare(sample)), RadiusSource::model_prediction};
}

Var sample_loss(Tape& tape, const ModelSpec& spec, const ParamSet& params, const PreparedSample& sample) {
  if (sample.target.size() == 0) throw InvalidInput("sample " + std::to_string(sample.id) + " has no labels");
  return mae_loss(model_forward(tape, spec, bind_params(tape, spec, params), sample), sample.target);
}

std::vector<ModelSpec> model_zoo() {
  constexpr std::size_t h = kHiddenWidth;
  constexpr std::size_t f = kFeatureDim;
  using enum LayerKind;
  const LayerSpec head{dense, h, 1, Activation::identity};
  return {
      {"mlp", {{dense, f, h, Activation::relu}, {dense, h, h, Activation::relu}, head}},
      {"gcn1", {{gcn, f, h, Activation::relu}, head}},
      {"gcn2", {{gcn, f, h, Activation::relu}, {gcn, h, h, Activation::relu}, head}},
      {"gcn3", {{gcn, f, h, Activation::relu}, {gcn, h, h, Activation::relu}, {gcn, h, h, Activation::relu}, head}},
      {"hybrid", {{gcn, f, h, Activation::relu}, {gat, h, h, Activation::relu}, head}},
  };
}

ModelSpec zoo_model(std::string_view name) {
  for (auto& m : model_zoo())
    if (m.name == name) return m;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

}  // namespace covertnet
