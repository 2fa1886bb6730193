#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "balance/core_model.hpp"
#include "balance/distributions.hpp"
#include "balance/roles.hpp"

namespace balance {

struct TrimRange {
  double lower = 0.01;
  double upper = 0.99;

  friend bool operator==(const TrimRange&, const TrimRange&) = default;
};

enum class DominanceMode { Strict, Quantile };

std::string_view to_string(DominanceMode mode) noexcept;

struct DominancePolicy {
  DominanceMode mode = DominanceMode::Quantile;
  double low_q = 0.05;
  double high_q = 0.95;
  std::size_t min_n = 20;
  TrimRange trim;
};

// Throws OutOfRange / BadQuantileRange.
void validate(const DominancePolicy& policy);

enum class DifficultyPolicy { RelativeDispersion, RawVariance };

std::string_view to_string(DifficultyPolicy policy) noexcept;

struct SymmetryDeviation {
  double absolute = 0.0;    // (1/K) sum (m_k - mean m)^2 over build medians m_k
  double normalized = 0.0;  // absolute / (mean m)^2
};

// Spread of per-build medians around their grand mean on one encounter.
// Throws TooFewBuilds (K < 2) or InsufficientSamples naming every build below min_n.
SymmetryDeviation symmetry_deviation(const std::map<BuildKey, PerformanceDistribution>& dists,
                                     std::size_t min_n = 20);

// Computed on the trimmed samples. RawVariance is the n-1 sample variance;
// RelativeDispersion is sample sd over the trimmed median. A trimmed
// singleton scores 0. Throws InsufficientSamples (n < min_n) and ZeroMedian.
double difficulty_score(const PerformanceDistribution& dist,
                        DifficultyPolicy policy = DifficultyPolicy::RelativeDispersion, std::size_t min_n = 20,
                        TrimRange trim = {});

// x dominates y when x's floor lies strictly above y's ceiling:
//   Strict:   floor = min(trimmed), ceiling = max(trimmed)
//   Quantile: floor = quantile(low_q), ceiling = quantile(high_q), untrimmed
struct DominanceBounds {
  double floor = 0.0;
  double ceiling = 0.0;
};

DominanceBounds dominance_bounds(const PerformanceDistribution& dist, const DominancePolicy& policy);

// Throws InsufficientSamples and MismatchedContext (different encounter or era).
bool dominates(const PerformanceDistribution& x, const PerformanceDistribution& y,
               const DominancePolicy& policy = {});

struct DominanceOccurrence {
  std::string encounter_id;
  BuildKey dominator;
};

struct ViabilityEntry {
  BuildKey key;
  std::size_t dominated_count = 0;
  std::vector<DominanceOccurrence> dominated_by;  // sorted by (encounter, dominator)
  std::size_t dominates_count = 0;
};

// Every ordered pair of builds meeting min_n on each encounter is judged;
// a build's count accumulates one per (encounter, dominator). Sorted by
// count descending, then BuildKey. Builds that never meet min_n are absent.
// Throws NoQualifyingPairs when no encounter has two qualifying builds.
std::vector<ViabilityEntry> viability_ranking(const EncounterDistributions& all, const DominancePolicy& policy = {});

// Player-slot counts per (profession, specialization).
struct PopularityTable {
  std::size_t total_slots = 0;
  std::map<ProfessionSpec, std::size_t> counts;

  double share(const ProfessionSpec& key) const;
  std::map<ProfessionSpec, double> shares() const;
};

// Throws EmptyEra(era_label) when there are no slots.
PopularityTable popularity(std::span<const CombatLog> logs, std::string_view era_label = {});

struct PopularityShift {
  ProfessionSpec key;
  double delta_pp = 0.0;  // 100 * (share_b - share_a)
};

// Absent builds count as share 0. Sorted by delta descending, then key.
// The delta is formed from integer cross-products so a 100/1000 -> 171/1000
// pair yields exactly 7.1.
std::vector<PopularityShift> popularity_shift(const PopularityTable& a, const PopularityTable& b);
std::vector<PopularityShift> popularity_shift(std::span<const CombatLog> logs, std::string_view era_a,
                                              std::string_view era_b);

// Observational: logs containing the build versus logs without it. It is
// confounded by group composition and skill and carries no causal reading.
struct FairnessDelta {
  BuildKey build;
  std::string encounter_id;
  double delta = 0.0;
  std::size_t n_with = 0;
  std::size_t n_without = 0;
  double rate_with = 0.0;
  double rate_without = 0.0;
};

inline constexpr std::string_view kFairnessCaveat = "observational, confounded";

// `logs` must share one encounter and era (MismatchedContext otherwise).
// Throws InsufficientSamples when either group is below min_n.
FairnessDelta fairness_success_delta(std::span<const CombatLog> logs, const BuildKey& build,
                                     const RoleThresholds& thresholds = {}, std::size_t min_n = 20);

}  // namespace balance
