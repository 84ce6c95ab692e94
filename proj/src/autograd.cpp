#include "covertnet/autograd.hpp"

#include <cmath>

#include "covertnet/error.hpp"

namespace covertnet {

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, {}, false});
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(const std::string& name, Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, name, true});
  return {this, nodes_.size() - 1};
}

std::vector<Var> Tape::parameters(const ParamSet& params) {
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (const auto& [name, t] : params) vars.push_back(parameter(name, t));
  return vars;
}

Var Tape::record(Tensor value, std::vector<std::size_t> inputs, BackwardFn fn) {
  bool needs = false;
  for (auto id : inputs) needs = needs || nodes_[id].needs_grad;
  nodes_.push_back(Node{std::move(value), {}, needs ? std::move(fn) : nullptr, {}, needs});
  return {this, nodes_.size() - 1};
}

Tensor& Tape::grad_buffer(std::size_t id) {
  auto& node = nodes_[id];
  if (node.grad.size() == 0 && node.value.size() != 0) node.grad = Tensor(node.value.rows(), node.value.cols());
  return node.grad;
}

void Tape::backward(Var root) {
  if (root.tape != this) throw InvalidInput("backward: root belongs to another tape");
  if (nodes_[root.id].value.size() != 1) throw InvalidInput("backward: root is not a scalar");
  if (done_) throw InvalidInput("backward: tape already differentiated");
  done_ = true;
  grad_buffer(root.id)[0] = 1.0;
  for (std::size_t id = root.id + 1; id-- > 0;) {
    auto& node = nodes_[id];
    if (!node.backward || node.grad.size() == 0) continue;
    node.backward(*this, id);
  }
}

GradSet Tape::gradients(const ParamSet& like) const {
  GradSet out = like.zeros_like();
  for (const auto& node : nodes_) {
    if (node.param_name.empty() || node.grad.size() == 0) continue;
    if (auto* g = out.find(node.param_name)) *g += node.grad;
  }
  return out;
}

namespace {

Tape& same_tape(Var a, Var b) {
  if (a.tape != b.tape || a.tape == nullptr) throw InvalidInput("autograd: operands recorded on different tapes");
  return *a.tape;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  Tensor out = covertnet::matmul(a.value(), b.value());
  const std::size_t ia = a.id;
  const std::size_t ib = b.id;
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.node_grad(self);
    const Tensor& av = tp.node_value(ia);
    const Tensor& bv = tp.node_value(ib);
    if (tp.needs_grad(ia)) {
      Tensor& ga = tp.grad_buffer(ia);  // g * b^T
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t k = 0; k < bv.rows(); ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < g.cols(); ++j) s += g(i, j) * bv(k, j);
          ga(i, k) += s;
        }
    }
    if (tp.needs_grad(ib)) {
      Tensor& gb = tp.grad_buffer(ib);  // a^T * g
      for (std::size_t i = 0; i < av.rows(); ++i)
        for (std::size_t k = 0; k < av.cols(); ++k) {
          const double aik = av(i, k);
          for (std::size_t j = 0; j < g.cols(); ++j) gb(k, j) += aik * g(i, j);
        }
    }
  });
}

Var transpose(Var a) {
  Tape& t = *a.tape;
  const std::size_t ia = a.id;
  return t.record(covertnet::transpose(a.value()), {ia}, [ia](Tape& tp, std::size_t self) {
    const Tensor& g = tp.node_grad(self);
    Tensor& ga = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) ga(j, i) += g(i, j);
  });
}

Var relu(Var x) {
  Tape& t = *x.tape;
  const std::size_t ix = x.id;
  return t.record(covertnet::relu(x.value()), {ix}, [ix](Tape& tp, std::size_t self) {
    const Tensor& g = tp.node_grad(self);
    const Tensor& xv = tp.node_value(ix);
    Tensor& gx = tp.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (xv[i] > 0.0) gx[i] += g[i];
  });
}

Var add_row(Var x, Var bias) {
  Tape& t = same_tape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != xv.cols()) throw InvalidInput("add_row: bias must be 1 x cols");
  Tensor out = xv;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bv(0, j);
  const std::size_t ix = x.id;
  const std::size_t ib = bias.id;
  return t.record(std::move(out), {ix, ib}, [ix, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.node_grad(self);
    if (tp.needs_grad(ix)) tp.grad_buffer(ix) += g;
    if (tp.needs_grad(ib)) {
      Tensor& gb = tp.grad_buffer(ib);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gb(0, j) += g(i, j);
    }
  });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  Tensor out = a.value();
  out += b.value();
  const std::size_t ia = a.id;
  const std::size_t ib = b.id;
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.node_grad(self);
    if (tp.needs_grad(ia)) tp.grad_buffer(ia) += g;
    if (tp.needs_grad(ib)) tp.grad_buffer(ib) += g;
  });
}

Var scale(Var a, double s) {
  Tape& t = *a.tape;
  Tensor out = a.value();
  out *= s;
  const std::size_t ia = a.id;
  return t.record(std::move(out), {ia}, [ia, s](Tape& tp, std::size_t self) {
    const Tensor& g = tp.node_grad(self);
    Tensor& ga = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  });
}

Var masked_softmax(Var scores, const BoolMatrix& mask) {
  Tape& t = *scores.tape;
  const std::size_t is = scores.id;
  return t.record(covertnet::masked_softmax(scores.value(), mask), {is}, [is](Tape& tp, std::size_t self) {
    const Tensor& g = tp.node_grad(self);
    const Tensor& y = tp.node_value(self);
    Tensor& gs = tp.grad_buffer(is);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
      // masked entries have y == 0 and receive nothing
      for (std::size_t j = 0; j < y.cols(); ++j) gs(i, j) += y(i, j) * (g(i, j) - dot);
    }
  });
}

Var mae_loss(Var pred, const Tensor& target) {
  Tape& t = *pred.tape;
  const double loss = covertnet::mae_loss(pred.value(), target);
  const std::size_t ip = pred.id;
  return t.record(Tensor::scalar(loss), {ip}, [ip, target](Tape& tp, std::size_t self) {
    const double g = tp.node_grad(self)[0];
    const Tensor& pv = tp.node_value(ip);
    Tensor& gp = tp.grad_buffer(ip);
    const double inv_n = 1.0 / static_cast<double>(pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double r = pv[i] - target[i];
      if (r > 0.0)
        gp[i] += g * inv_n;
      else if (r < 0.0)
        gp[i] -= g * inv_n;
    }
  });
}

}  // namespace covertnet
