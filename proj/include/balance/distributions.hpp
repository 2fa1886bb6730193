#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>

#include "balance/core_model.hpp"
#include "balance/roles.hpp"

namespace balance {

struct DistributionKey {
  std::string encounter_id;
  BuildKey build;

  friend bool operator==(const DistributionKey&, const DistributionKey&) = default;
  friend auto operator<=>(const DistributionKey& a, const DistributionKey& b) {
    if (auto c = a.encounter_id <=> b.encounter_id; c != 0) return c;
    return a.build <=> b.build;
  }
};

using DistributionMap = std::map<DistributionKey, PerformanceDistribution>;
// encounter -> build -> distribution
using EncounterDistributions = std::map<std::string, std::map<BuildKey, PerformanceDistribution>>;

// Role baseline for classification: interpolated median dps over every
// player slot of the encounter, floored at 1e-9 so an all-zero encounter
// still classifies.
std::map<std::string, double> encounter_baselines(std::span<const CombatLog> logs);

// One sample per player slot per attempt. Roles are classified against the
// encounter's median dps (first pass) before samples are grouped (second pass).
// Logs from other eras are ignored.
DistributionMap build_distributions(std::span<const CombatLog> logs, const std::string& era,
                                    const RoleThresholds& thresholds = {});

EncounterDistributions group_by_encounter(const DistributionMap& dists);

// Linear interpolation between closest ranks. Throws QOutOfRange.
double quantile(const PerformanceDistribution& dist, double q);

// Keeps samples inside [quantile(lower_q), quantile(upper_q)]. Falls back to
// the median as a singleton if nothing would remain. Throws BadQuantileRange
// unless 0 <= lower_q < upper_q <= 1.
PerformanceDistribution trim(const PerformanceDistribution& dist, double lower_q, double upper_q);

// k samples without replacement (partial Fisher-Yates), re-sorted; identity
// when n <= k.
PerformanceDistribution subsample(const PerformanceDistribution& dist, std::size_t k, std::uint64_t seed);

}  // namespace balance
