#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "covertnet/bool_matrix.hpp"
#include "covertnet/params.hpp"
#include "covertnet/tensor.hpp"

namespace covertnet {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
};

/// Records operations for reverse-mode differentiation.
///
/// Nodes are appended in evaluation order, so a reverse sweep over the node
/// list is a valid topological order. A tape is single-use: build, call
/// backward once, read gradients.
class Tape {
 public:
  Var constant(Tensor value);
  Var parameter(const std::string& name, Tensor value);

  /// Leaf parameters for every entry of `params`, keyed by name.
  std::vector<Var> parameters(const ParamSet& params);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

  /// Propagates d(root)/d(node) to every node. The root must be 1 x 1.
  void backward(Var root);

  /// Gradients of the recorded parameters, laid out like `like`; entries of
  /// `like` that never reached the tape get zeros.
  GradSet gradients(const ParamSet& like) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }

  // Used by the differentiable ops.
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;
  Var record(Tensor value, std::vector<std::size_t> inputs, BackwardFn fn);
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  Tensor& grad_buffer(std::size_t id);
  const Tensor& node_value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& node_grad(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    BackwardFn backward;
    std::string param_name;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
  bool done_ = false;
};

Var matmul(Var a, Var b);
Var transpose(Var a);
Var relu(Var x);
/// x + bias, with a 1 x cols bias broadcast over rows.
Var add_row(Var x, Var bias);
Var add(Var a, Var b);
Var scale(Var a, double s);
Var masked_softmax(Var scores, const BoolMatrix& mask);
/// Mean absolute error against a constant target; subgradient 0 at a zero residual.
Var mae_loss(Var pred, const Tensor& target);

}  // namespace covertnet
