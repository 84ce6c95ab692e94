#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covertnet/dataset.hpp"
#include "covertnet/gnn.hpp"

namespace covertnet {

double mae(std::span<const double> preds, std::span<const double> labels);

/// Median absolute error; the midpoint of the two central values for even counts.
double medae(std::span<const double> preds, std::span<const double> labels);

enum class SplitKind { train, test };
std::string_view to_string(SplitKind s) noexcept;
SplitKind split_kind_from_string(std::string_view s);

struct SampleMetrics {
  std::uint64_t id = 0;
  double mae = 0.0;
  double area_ratio = 0.0;
  bool feasible = false;
};

struct MetricsReport {
  std::string model_name;
  SplitKind split = SplitKind::test;
  double mae = 0.0;
  double medae = 0.0;
  double mean_area_ratio = 0.0;
  double area_ratio_std_error = 0.0;
  double feasibility_rate = 0.0;
  std::size_t n_samples = 0;
  std::vector<SampleMetrics> per_sample;
};

/// Scores radius predictions against the labels of `ids`.
///
/// MAE and MedAE pool every node of every sample. Area metrics use the
/// repaired predictions against the label union area, both measured with
/// `area` (same seed, so stochastic methods share their sample stream).
MetricsReport evaluate_predictions(const std::string& model_name, SplitKind split, const Dataset& dataset,
                                   const std::vector<std::uint64_t>& ids,
                                   const std::vector<std::vector<double>>& predictions, const AreaConfig& area);

MetricsReport evaluate(const ModelSpec& spec, const ParamSet& params, const Dataset& dataset,
                       const std::vector<std::uint64_t>& ids, SplitKind split, const AreaConfig& area);

/// MAE and MedAE only (no area work); used inside training loops.
struct ErrorSummary {
  double mae = 0.0;
  double medae = 0.0;
};
ErrorSummary error_summary(const ModelSpec& spec, const ParamSet& params, std::span<const PreparedSample> samples);

struct Reduction {
  std::string better;
  std::string worse;
  double mae_reduction_pct = 0.0;
  double medae_reduction_pct = 0.0;
};

struct ComparisonTable {
  std::vector<MetricsReport> ranking;  // ascending MAE
  std::vector<Reduction> reductions;   // every ordered pair (better ranked first)
};

/// Throws InvalidInput for fewer than two reports or mixed splits.
ComparisonTable compare(std::vector<MetricsReport> reports);

/// 100 * (worse - better) / worse; 0 when worse is 0.
double relative_reduction_pct(double better, double worse);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);
std::string comparison_to_csv(const ComparisonTable& table);

}  // namespace covertnet
