#include "covertnet/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "covertnet/error.hpp"

namespace covertnet {

namespace {

double evaluate(const LossBuilder& loss, const ParamSet& params) {
  Tape tape;
  return loss(tape, params).value().item();
}

}  // namespace

GradCheckReport grad_check(const LossBuilder& loss, const ParamSet& params, double step, double tolerance,
                           double abs_floor) {
  if (!(step >= 1e-7 && step <= 1e-3)) throw InvalidInput("grad_check: step must lie in [1e-7, 1e-3]");
  Tape tape;
  Var root = loss(tape, params);
  tape.backward(root);
  const GradSet analytic = tape.gradients(params);

  const double base = evaluate(loss, params);
  auto close = [&](double a, double b) { return std::abs(a - b) <= tolerance * (std::abs(a) + std::abs(b)) + abs_floor; };

  GradCheckReport report;
  report.tolerance = tolerance;
  ParamSet probe = params;
  for (auto& [name, tensor] : probe) {
    const Tensor& ga = analytic.at(name);
    GradCheckEntry entry{name, 0.0, 0.0, 0};
    double diff_sq = 0.0, a_sq = 0.0, n_sq = 0.0;
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double saved = tensor[i];
      tensor[i] = saved + step;
      const double up = evaluate(loss, probe);
      tensor[i] = saved - step;
      const double down = evaluate(loss, probe);
      tensor[i] = saved;
      double numeric = (up - down) / (2.0 * step);
      const double forward = (up - base) / step;
      const double backward = (base - down) / step;
      if (!close(ga[i], numeric) && !close(forward, backward)) {
        const double side = std::abs(ga[i] - forward) < std::abs(ga[i] - backward) ? forward : backward;
        if (close(ga[i], side)) {
          numeric = side;
          ++entry.kinks;
        }
      }
      const double abs_err = std::abs(ga[i] - numeric);
      entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
      diff_sq += abs_err * abs_err;
      a_sq += ga[i] * ga[i];
      n_sq += numeric * numeric;
    }
    entry.max_rel_error = std::sqrt(diff_sq) / std::max(std::sqrt(a_sq) + std::sqrt(n_sq), abs_floor);
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.kinks += entry.kinks;
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace covertnet
