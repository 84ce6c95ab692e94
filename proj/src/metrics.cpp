#include "covertnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "covertnet/error.hpp"
#include "covertnet/io.hpp"

namespace covertnet {

using json = nlohmann::ordered_json;

double mae(std::span<const double> preds, std::span<const double> labels) {
  if (preds.size() != labels.size()) throw InvalidInput("mae: length mismatch");
  if (preds.empty()) throw InvalidInput("mae: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) s += std::abs(preds[i] - labels[i]);
  return s / static_cast<double>(preds.size());
}

double medae(std::span<const double> preds, std::span<const double> labels) {
  if (preds.size() != labels.size()) throw InvalidInput("medae: length mismatch");
  if (preds.empty()) throw InvalidInput("medae: empty input");
  std::vector<double> err(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) err[i] = std::abs(preds[i] - labels[i]);
  std::sort(err.begin(), err.end());
  const std::size_t n = err.size();
  return n % 2 == 1 ? err[n / 2] : 0.5 * (err[n / 2 - 1] + err[n / 2]);
}

std::string_view to_string(SplitKind s) noexcept { return s == SplitKind::train ? "train" : "test"; }

SplitKind split_kind_from_string(std::string_view s) {
  if (s == "train") return SplitKind::train;
  if (s == "test") return SplitKind::test;
  throw ConfigError("unknown split '" + std::string(s) + "'");
}

MetricsReport evaluate_predictions(const std::string& model_name, SplitKind split, const Dataset& dataset,
                                   const std::vector<std::uint64_t>& ids,
                                   const std::vector<std::vector<double>>& predictions, const AreaConfig& area) {
  if (ids.empty()) throw InvalidInput("evaluate: empty split");
  if (predictions.size() != ids.size()) throw InvalidInput("evaluate: prediction count does not match split");
  MetricsReport r;
  r.model_name = model_name;
  r.split = split;
  r.n_samples = ids.size();
  std::vector<double> all_preds;
  std::vector<double> all_labels;
  double ratio_sum = 0.0;
  double ratio_var = 0.0;
  std::size_t feasible = 0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto& s = dataset.sample(ids[k]);
    if (!s.labels) throw InvalidInput("evaluate: sample " + std::to_string(s.id) + " has no labels");
    const auto& labels = s.labels->radii;
    const auto& pred = predictions[k];
    if (pred.size() != labels.size()) throw InvalidInput("evaluate: prediction size mismatch");
    all_preds.insert(all_preds.end(), pred.begin(), pred.end());
    all_labels.insert(all_labels.end(), labels.begin(), labels.end());

    SampleMetrics m;
    m.id = s.id;
    m.mae = mae(pred, labels);
    m.feasible = is_connected(induced_adjacency(s.topology.positions, pred));
    const auto repaired = repair_radii(s.topology, {pred, RadiusSource::model_prediction});
    const auto a_pred = assignment_area(s.topology, repaired.radii, area);
    const auto a_label = assignment_area(s.topology, labels, area);
    m.area_ratio = a_label.value > 0.0 ? a_pred.value / a_label.value : 1.0;
    if (a_label.value > 0.0 && a_pred.value > 0.0) {
      const double rel = std::hypot(a_pred.std_error / a_pred.value, a_label.std_error / a_label.value);
      ratio_var += (m.area_ratio * rel) * (m.area_ratio * rel);
    }
    ratio_sum += m.area_ratio;
    feasible += m.feasible ? 1 : 0;
    r.per_sample.push_back(m);
  }
  const double n = static_cast<double>(ids.size());
  r.mae = mae(all_preds, all_labels);
  r.medae = medae(all_preds, all_labels);
  r.mean_area_ratio = ratio_sum / n;
  r.area_ratio_std_error = std::sqrt(ratio_var) / n;
  r.feasibility_rate = static_cast<double>(feasible) / n;
  return r;
}

MetricsReport evaluate(const ModelSpec& spec, const ParamSet& params, const Dataset& dataset,
                       const std::vector<std::uint64_t>& ids, SplitKind split, const AreaConfig& area) {
  if (spec.layers.front().in_dim != kFeatureDim) throw InvalidInput("evaluate: model input width does not match features");
  std::vector<std::vector<double>> preds;
  preds.reserve(ids.size());
  for (auto id : ids) preds.push_back(predict(spec, params, prepare(dataset.sample(id))));
  return evaluate_predictions(spec.name, split, dataset, ids, preds, area);
}

ErrorSummary error_summary(const ModelSpec& spec, const ParamSet& params, std::span<const PreparedSample> samples) {
  std::vector<double> preds;
  std::vector<double> labels;
  for (const auto& s : samples) {
    const auto p = predict(spec, params, s);
    preds.insert(preds.end(), p.begin(), p.end());
    labels.insert(labels.end(), s.target.values().begin(), s.target.values().end());
  }
  return {mae(preds, labels), medae(preds, labels)};
}

double relative_reduction_pct(double better, double worse) {
  return worse == 0.0 ? 0.0 : 100.0 * (worse - better) / worse;
}

ComparisonTable compare(std::vector<MetricsReport> reports) {
  if (reports.size() < 2) throw InvalidInput("compare: need at least two reports");
  for (const auto& r : reports)
    if (r.split != reports.front().split) throw InvalidInput("compare: reports come from different splits");
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) { return a.mae < b.mae; });
  ComparisonTable t;
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (std::size_t j = i + 1; j < reports.size(); ++j)
      t.reductions.push_back({reports[i].model_name, reports[j].model_name,
                              relative_reduction_pct(reports[i].mae, reports[j].mae),
                              relative_reduction_pct(reports[i].medae, reports[j].medae)});
  t.ranking = std::move(reports);
  return t;
}

std::string report_to_json(const MetricsReport& r) {
  json per = json::array();
  for (const auto& s : r.per_sample)
    per.push_back({{"id", s.id}, {"mae", s.mae}, {"area_ratio", s.area_ratio}, {"feasible", s.feasible}});
  json j{{"schema_version", kSchemaVersion},
         {"model_name", r.model_name},
         {"split", to_string(r.split)},
         {"pooling", "per_node"},
         {"mae", r.mae},
         {"medae", r.medae},
         {"mean_area_ratio", r.mean_area_ratio},
         {"area_ratio_std_error", r.area_ratio_std_error},
         {"feasibility_rate", r.feasibility_rate},
         {"n_samples", r.n_samples},
         {"per_sample", std::move(per)}};
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    MetricsReport r;
    r.model_name = j.at("model_name").get<std::string>();
    r.split = split_kind_from_string(j.at("split").get<std::string>());
    r.mae = j.at("mae").get<double>();
    r.medae = j.at("medae").get<double>();
    r.mean_area_ratio = j.value("mean_area_ratio", 0.0);
    r.area_ratio_std_error = j.value("area_ratio_std_error", 0.0);
    r.feasibility_rate = j.value("feasibility_rate", 0.0);
    r.n_samples = j.value("n_samples", std::size_t{0});
    if (j.contains("per_sample"))
      for (const auto& s : j.at("per_sample"))
        r.per_sample.push_back({s.at("id").get<std::uint64_t>(), s.at("mae").get<double>(),
                                s.at("area_ratio").get<double>(), s.at("feasible").get<bool>()});
    return r;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("report: malformed JSON: ") + e.what());
  }
}

std::string comparison_to_csv(const ComparisonTable& t) {
  std::ostringstream os;
  os << "rank,model_name,split,mae,medae,mean_area_ratio,feasibility_rate\n";
  for (std::size_t i = 0; i < t.ranking.size(); ++i) {
    const auto& r = t.ranking[i];
    os << i + 1 << ',' << r.model_name << ',' << to_string(r.split) << ',' << format_double(r.mae) << ','
       << format_double(r.medae) << ',' << format_double(r.mean_area_ratio) << ',' << format_double(r.feasibility_rate)
       << '\n';
  }
  os << "\nbetter,worse,mae_reduction_pct,medae_reduction_pct\n";
  for (const auto& red : t.reductions)
    os << red.better << ',' << red.worse << ',' << format_double(red.mae_reduction_pct) << ','
       << format_double(red.medae_reduction_pct) << '\n';
  return os.str();
}

}  // namespace covertnet
