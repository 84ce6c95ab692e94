#include "covertnet/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "covertnet/error.hpp"
#include "covertnet/io.hpp"
#include "covertnet/metrics.hpp"
#include "covertnet/train.hpp"

namespace covertnet {

std::string_view to_string(PruneScope s) noexcept { return s == PruneScope::global_rank ? "global_rank" : "per_layer"; }

PruneScope prune_scope_from_string(std::string_view s) {
  if (s == "global_rank") return PruneScope::global_rank;
  if (s == "per_layer") return PruneScope::per_layer;
  throw ConfigError("unknown prune scope '" + std::string(s) + "'");
}

std::size_t PruneMask::pruned_count() const {
  std::size_t n = 0;
  for (const auto& [name, bits] : entries) n += static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
  return n;
}

const std::vector<bool>* PruneMask::find(const std::string& name) const {
  for (const auto& [n, bits] : entries)
    if (n == name) return &bits;
  return nullptr;
}

bool is_prunable(const std::string& name) {
  constexpr std::string_view suffix = ".weight";
  return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
}

namespace {

struct Candidate {
  double magnitude;
  const std::string* name;
  std::size_t tensor;  // index into mask entries
  std::size_t index;
};

bool rank_less(const Candidate& a, const Candidate& b) {
  return std::tie(a.magnitude, *a.name, a.index) < std::tie(b.magnitude, *b.name, b.index);
}

std::size_t prune_count(double rho, std::size_t total) {
  return std::min(total, static_cast<std::size_t>(std::llround(rho * static_cast<double>(total))));
}

}  // namespace

PrunedModel prune_by_magnitude(const ParamSet& params, const PruneConfig& config) {
  if (!(config.sparsity >= 0.0 && config.sparsity <= 1.0)) throw InvalidInput("prune: sparsity must lie in [0, 1]");
  PrunedModel out;
  out.params = params;

  std::vector<std::vector<Candidate>> groups(1);
  for (const auto& [name, t] : params) {
    if (!is_prunable(name)) continue;
    const std::size_t slot = out.mask.entries.size();
    out.mask.entries.emplace_back(name, std::vector<bool>(t.size(), false));
    if (config.scope == PruneScope::per_layer && !groups.back().empty()) groups.emplace_back();
    for (std::size_t i = 0; i < t.size(); ++i) groups.back().push_back({std::abs(t[i]), &name, slot, i});
    out.prunable_count += t.size();
  }

  for (auto& group : groups) {
    const std::size_t k = prune_count(config.sparsity, group.size());
    std::sort(group.begin(), group.end(), rank_less);
    for (std::size_t c = 0; c < k; ++c) {
      auto& [name, bits] = out.mask.entries[group[c].tensor];
      bits[group[c].index] = true;
      out.params.at(name)[group[c].index] = 0.0;
    }
  }
  out.achieved_sparsity =
      out.prunable_count == 0 ? 0.0 : static_cast<double>(out.mask.pruned_count()) / static_cast<double>(out.prunable_count);
  return out;
}

PruneValidation validate_prune(const ParamSet& original, const PrunedModel& pruned, const ModelSpec& spec,
                               const Dataset& dataset, const std::vector<std::uint64_t>& eval_ids, double threshold) {
  if (eval_ids.empty()) throw InvalidInput("validate_prune: empty evaluation split");
  if (!(threshold >= 0.0)) throw InvalidInput("validate_prune: threshold must be >= 0");
  const auto samples = prepare(dataset, ascending(eval_ids));
  PruneValidation v;
  v.original_mae = error_summary(spec, original, samples).mae;
  v.pruned_mae = error_summary(spec, pruned.params, samples).mae;
  v.delta = v.pruned_mae - v.original_mae;
  v.threshold = threshold;
  v.accepted = v.delta <= threshold;
  return v;
}

std::vector<SweepRow> sparsity_sweep(const ParamSet& params, const ModelSpec& spec, const Dataset& dataset,
                                     const std::vector<std::uint64_t>& eval_ids, const std::vector<double>& levels,
                                     PruneScope scope) {
  for (double rho : levels)
    if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidInput("sparsity_sweep: levels must lie in [0, 1]");
  if (eval_ids.empty()) throw InvalidInput("sparsity_sweep: empty evaluation split");
  const auto samples = prepare(dataset, ascending(eval_ids));
  std::vector<SweepRow> rows;
  for (double rho : levels) {
    const auto pruned = prune_by_magnitude(params, {rho, scope});
    const auto e = error_summary(spec, pruned.params, samples);
    rows.push_back({rho, e.mae, e.medae, pruned.achieved_sparsity});
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "rho,test_mae,test_medae,achieved_sparsity\n";
  for (const auto& r : rows)
    os << format_double(r.rho) << ',' << format_double(r.test_mae) << ',' << format_double(r.test_medae) << ','
       << format_double(r.achieved_sparsity) << '\n';
  return os.str();
}

std::string validation_to_json(const PruneValidation& v, const PrunedModel& pruned, const PruneConfig& config) {
  nlohmann::ordered_json j{{"schema_version", kSchemaVersion},
                           {"sparsity", config.sparsity},
                           {"scope", to_string(config.scope)},
                           {"achieved_sparsity", pruned.achieved_sparsity},
                           {"pruned_weights", pruned.mask.pruned_count()},
                           {"prunable_weights", pruned.prunable_count},
                           {"original_mae", v.original_mae},
                           {"pruned_mae", v.pruned_mae},
                           {"delta", v.delta},
                           {"threshold", std::isinf(v.threshold) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(v.threshold)},
                           {"accepted", v.accepted}};
  return j.dump(2) + "\n";
}

}  // namespace covertnet
