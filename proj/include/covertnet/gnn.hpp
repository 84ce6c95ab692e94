#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "covertnet/autograd.hpp"
#include "covertnet/dataset.hpp"
#include "covertnet/params.hpp"

namespace covertnet {

enum class LayerKind { gcn, gat, dense };
enum class Activation { relu, identity };

std::string_view to_string(LayerKind k) noexcept;
std::string_view to_string(Activation a) noexcept;
LayerKind layer_kind_from_string(std::string_view s);
Activation activation_from_string(std::string_view s);

struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  std::size_t in_dim = 1;
  std::size_t out_dim = 1;
  Activation activation = Activation::relu;

  bool operator==(const LayerSpec&) const = default;
};

struct ModelSpec {
  std::string name;
  std::vector<LayerSpec> layers;

  /// Throws InvalidInput unless dims chain, every dim >= 1 and the last layer emits one value per node.
  void validate() const;
  bool uses_message_passing() const;
  bool operator==(const ModelSpec&) const = default;
};

/// Parameter names used for layer `index`.
std::string weight_name(std::size_t index);
std::string bias_name(std::size_t index);

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)); biases zero.
ParamSet init_params(const ModelSpec& spec, std::uint64_t seed);

/// Throws InvalidInput if `params` does not carry every weight of `spec` with the right shape.
void check_params(const ModelSpec& spec, const ParamSet& params);

/// D^{-1/2} A D^{-1/2}, degrees counted on `adjacency` as given (self-loops included).
Tensor normalised_adjacency(const AdjacencyMatrix& adjacency);

/// relu(sum_j W h_j / sqrt(deg_i deg_j)) over neighbours j of i (self included).
Tensor gcn_forward(const Tensor& h, const Tensor& w, const AdjacencyMatrix& adjacency);

/// Attention weights alpha_ij = softmax over neighbours of h_i . h_j.
Tensor gat_attention(const Tensor& h, const AdjacencyMatrix& adjacency);

/// relu(sum_j alpha_ij W h_j).
Tensor gat_forward(const Tensor& h, const Tensor& w, const AdjacencyMatrix& adjacency);

/// A sample with its constant operands precomputed.
struct PreparedSample {
  std::uint64_t id = 0;
  Tensor features;
  AdjacencyMatrix adjacency;
  Tensor norm_adjacency;
  Tensor target;  // N x 1; empty when the sample is unlabeled
};

PreparedSample prepare(const GraphSample& sample);
std::vector<PreparedSample> prepare(const Dataset& dataset, const std::vector<std::uint64_t>& ids);

/// Leaf variables for the weights of `spec`, in layer order (weight, bias, ...).
std::vector<Var> bind_params(Tape& tape, const ModelSpec& spec, const ParamSet& params);

/// Records the model on `tape`; returns the N x 1 prediction.
Var model_forward(Tape& tape, const ModelSpec& spec, const std::vector<Var>& params, const PreparedSample& sample);

/// Tape-free prediction, one radius per node (source = model_prediction).
RadiusAssignment model_forward(const ModelSpec& spec, const ParamSet& params, const GraphSample& sample);
std::vector<double> predict(const ModelSpec& spec, const ParamSet& params, const PreparedSample& sample);

/// Per-sample MAE loss on the tape.
Var sample_loss(Tape& tape, const ModelSpec& spec, const ParamSet& params, const PreparedSample& sample);

/// `mlp`, `gcn1`, `gcn2`, `gcn3`, `hybrid`; hidden width 16, two input features.
std::vector<ModelSpec> model_zoo();
ModelSpec zoo_model(std::string_view name);

inline constexpr std::size_t kHiddenWidth = 16;
inline constexpr std::size_t kFeatureDim = 2;

}  // namespace covertnet
