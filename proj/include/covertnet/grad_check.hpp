#pragma once

#include <functional>
#include <string>
#include <vector>

#include "covertnet/autograd.hpp"
#include "covertnet/params.hpp"

namespace covertnet {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t kinks = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  std::size_t kinks = 0;
  bool passed = false;
};

/// Builds a scalar loss on the tape from the given parameters.
using LossBuilder = std::function<Var(Tape&, const ParamSet&)>;

/// Compares reverse-mode gradients with central differences.
///
/// Relative error per tensor is |a - n| / max(|a| + |n|, abs_floor) in the
/// Euclidean norm; the floor covers tensors whose gradient is zero.
///
/// An entry whose probe interval straddles a kink (ReLU or absolute value)
/// has one-sided differences that disagree. When the analytic value matches
/// one of them, that one-sided value replaces the central difference and the
/// entry is counted in `kinks`.
GradCheckReport grad_check(const LossBuilder& loss, const ParamSet& params, double step, double tolerance,
                           double abs_floor = 1e-7);

}  // namespace covertnet
