#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "balance/balance_metrics.hpp"
#include "balance/core_model.hpp"
#include "balance/roles.hpp"

namespace balance {

inline constexpr std::string_view kReportFormat = "balance-report/1";
inline constexpr std::string_view kEngineVersion = "0.1.0";

struct MetricsConfig {
  RoleThresholds thresholds;
  DominancePolicy dominance;  // min_n and trim are shared by every metric
  DifficultyPolicy difficulty = DifficultyPolicy::RelativeDispersion;
  bool exclude_support = false;
  std::size_t cloud_cap = 1000;  // per-distribution sample cap for plot clouds
  std::uint64_t cloud_seed = 0;
};

struct EncounterSymmetry {
  std::string encounter_id;
  std::size_t builds = 0;
  SymmetryDeviation deviation;
};

struct DifficultyEntry {
  BuildKey key;
  double score = 0.0;  // sample-count-weighted mean over qualifying encounters
  std::size_t n = 0;
  std::size_t encounters = 0;
};

struct BuildPerformance {
  BuildKey key;
  double median_dps = 0.0;  // sample-count-weighted mean of per-encounter medians
  std::size_t n = 0;
};

struct DistributionSummary {
  std::string encounter_id;
  BuildKey key;
  std::size_t n = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  bool qualifies = false;
  std::vector<double> cloud;  // subsample of at most cloud_cap samples, ascending
};

struct BalanceReport {
  EraId era;
  std::optional<EraId> reference_era;
  std::string registry_hash;
  MetricsConfig config;
  std::size_t log_count = 0;
  std::size_t slot_count = 0;

  std::vector<EncounterSymmetry> symmetry;
  std::optional<double> symmetry_aggregate;  // unweighted mean of normalized deviations
  std::vector<DifficultyEntry> difficulty;   // hardest first
  std::vector<ViabilityEntry> viability;     // least viable first
  std::vector<BuildPerformance> performance; // BuildKey order
  PopularityTable popularity;
  std::optional<PopularityTable> reference_popularity;
  std::vector<PopularityShift> popularity_shift;  // reference -> era
  std::vector<FairnessDelta> fairness;
  std::vector<DistributionSummary> distributions;
};

// A distribution qualifies for damage metrics when n >= min_n and, with
// exclude_support, its role is not a support role. Throws InsufficientSamples
// when nothing qualifies. `reference_logs` feeds popularity_shift.
BalanceReport build_balance_report(std::span<const CombatLog> logs, const EraId& era, const MetricsConfig& config,
                                   const std::string& registry_hash = {},
                                   std::optional<std::pair<EraId, std::span<const CombatLog>>> reference = std::nullopt);

nlohmann::json to_json(const MetricsConfig& config);
nlohmann::json to_json(const PopularityTable& table);
nlohmann::json to_json(const BalanceReport& report);
// Keys as written by to_json(MetricsConfig); absent keys keep `base`.
MetricsConfig metrics_config_from_json(const nlohmann::json& j, MetricsConfig base = {});
BalanceReport report_from_json(const nlohmann::json& j);

// Pretty-printed, key-sorted, newline-terminated. Byte-identical for equal reports.
std::string render_report(const nlohmann::json& j);

}  // namespace balance
