#include "balance/balance_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "balance/error.hpp"

namespace balance {

std::string_view to_string(DominanceMode mode) noexcept {
  return mode == DominanceMode::Strict ? "strict" : "quantile";
}

std::string_view to_string(DifficultyPolicy policy) noexcept {
  return policy == DifficultyPolicy::RawVariance ? "variance" : "cv";
}

void validate(const DominancePolicy& p) {
  if (!(p.low_q >= 0.0 && p.low_q < p.high_q && p.high_q <= 1.0))
    throw Error(ErrorCode::BadQuantileRange, "dominance", "need 0 <= low_q < high_q <= 1");
  if (!(p.trim.lower >= 0.0 && p.trim.lower < p.trim.upper && p.trim.upper <= 1.0))
    throw Error(ErrorCode::BadQuantileRange, "trim", "need 0 <= lower < upper <= 1");
  if (p.min_n < 2) throw Error(ErrorCode::OutOfRange, "min_n", "must be >= 2");
}

SymmetryDeviation symmetry_deviation(const std::map<BuildKey, PerformanceDistribution>& dists, std::size_t min_n) {
  if (dists.size() < 2) throw Error(ErrorCode::TooFewBuilds, "", std::to_string(dists.size()) + " build(s)");
  std::string short_builds;
  for (const auto& [key, d] : dists) {
    if (d.n() < min_n) short_builds += (short_builds.empty() ? "" : ",") + key.to_string();
  }
  if (!short_builds.empty())
    throw Error(ErrorCode::InsufficientSamples, short_builds, "fewer than " + std::to_string(min_n) + " samples");

  std::vector<double> medians;
  for (const auto& [key, d] : dists) medians.push_back(d.median());
  auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  if (*lo == *hi) return {};

  double mean = 0.0;
  for (double m : medians) mean += m;
  mean /= static_cast<double>(medians.size());
  double sq = 0.0;
  for (double m : medians) sq += (m - mean) * (m - mean);
  SymmetryDeviation out;
  out.absolute = sq / static_cast<double>(medians.size());
  out.normalized = out.absolute / (mean * mean);
  return out;
}

double difficulty_score(const PerformanceDistribution& dist, DifficultyPolicy policy, std::size_t min_n,
                        TrimRange range) {
  if (dist.n() < min_n)
    throw Error(ErrorCode::InsufficientSamples, dist.key().to_string(),
                std::to_string(dist.n()) + " < " + std::to_string(min_n));
  PerformanceDistribution t = trim(dist, range.lower, range.upper);
  if (policy == DifficultyPolicy::RelativeDispersion && !(t.median() > 0.0))
    throw Error(ErrorCode::ZeroMedian, dist.key().to_string());
  if (t.n() < 2) return 0.0;

  auto s = t.samples();
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double ss = 0.0;
  for (double v : s) ss += (v - mean) * (v - mean);
  double variance = ss / static_cast<double>(s.size() - 1);
  if (policy == DifficultyPolicy::RawVariance) return variance;
  return std::sqrt(variance) / t.median();
}

DominanceBounds dominance_bounds(const PerformanceDistribution& dist, const DominancePolicy& policy) {
  if (policy.mode == DominanceMode::Strict) {
    PerformanceDistribution t = trim(dist, policy.trim.lower, policy.trim.upper);
    return {t.min(), t.max()};
  }
  return {quantile(dist, policy.low_q), quantile(dist, policy.high_q)};
}

bool dominates(const PerformanceDistribution& x, const PerformanceDistribution& y, const DominancePolicy& policy) {
  validate(policy);
  for (const auto* d : {&x, &y}) {
    if (d->n() < policy.min_n)
      throw Error(ErrorCode::InsufficientSamples, d->key().to_string(),
                  std::to_string(d->n()) + " < " + std::to_string(policy.min_n));
  }
  if (x.encounter_id() != y.encounter_id() || x.era() != y.era())
    throw Error(ErrorCode::MismatchedContext, x.key().to_string() + " vs " + y.key().to_string());
  return dominance_bounds(x, policy).floor > dominance_bounds(y, policy).ceiling;
}

std::vector<ViabilityEntry> viability_ranking(const EncounterDistributions& all, const DominancePolicy& policy) {
  validate(policy);
  std::map<BuildKey, ViabilityEntry> entries;
  bool any_pair = false;
  for (const auto& [encounter, builds] : all) {
    std::vector<std::pair<const BuildKey*, DominanceBounds>> qualifying;
    for (const auto& [key, dist] : builds) {
      if (dist.n() >= policy.min_n) qualifying.emplace_back(&key, dominance_bounds(dist, policy));
    }
    for (const auto& [key, bounds] : qualifying) entries.try_emplace(*key, ViabilityEntry{*key});
    if (qualifying.size() < 2) continue;
    any_pair = true;
    for (const auto& [dominated, lower] : qualifying) {
      for (const auto& [dominator, upper] : qualifying) {
        if (dominated == dominator || !(upper.floor > lower.ceiling)) continue;
        auto& e = entries.at(*dominated);
        ++e.dominated_count;
        e.dominated_by.push_back({encounter, *dominator});
        ++entries.at(*dominator).dominates_count;
      }
    }
  }
  if (!any_pair) throw Error(ErrorCode::NoQualifyingPairs, "", "no encounter has two builds with n >= min_n");

  std::vector<ViabilityEntry> ranked;
  for (auto& [key, e] : entries) ranked.push_back(std::move(e));
  std::stable_sort(ranked.begin(), ranked.end(), [](const ViabilityEntry& a, const ViabilityEntry& b) {
    return a.dominated_count > b.dominated_count;
  });
  return ranked;
}

double PopularityTable::share(const ProfessionSpec& key) const {
  auto it = counts.find(key);
  if (it == counts.end() || total_slots == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_slots);
}

std::map<ProfessionSpec, double> PopularityTable::shares() const {
  std::map<ProfessionSpec, double> out;
  for (const auto& [key, count] : counts) out[key] = share(key);
  return out;
}

PopularityTable popularity(std::span<const CombatLog> logs, std::string_view era_label) {
  PopularityTable table;
  for (const auto& log : logs) {
    for (const auto& p : log.players) {
      ++table.counts[p.profession_spec()];
      ++table.total_slots;
    }
  }
  if (table.total_slots == 0) throw Error(ErrorCode::EmptyEra, std::string(era_label));
  return table;
}

std::vector<PopularityShift> popularity_shift(const PopularityTable& a, const PopularityTable& b) {
  if (a.total_slots == 0) throw Error(ErrorCode::EmptyEra, "era_a");
  if (b.total_slots == 0) throw Error(ErrorCode::EmptyEra, "era_b");
  std::set<ProfessionSpec> keys;
  for (const auto& [k, c] : a.counts) keys.insert(k);
  for (const auto& [k, c] : b.counts) keys.insert(k);

  const auto total_a = static_cast<std::int64_t>(a.total_slots);
  const auto total_b = static_cast<std::int64_t>(b.total_slots);
  std::vector<PopularityShift> out;
  for (const auto& key : keys) {
    auto count = [&key](const PopularityTable& t) -> std::int64_t {
      auto it = t.counts.find(key);
      return it == t.counts.end() ? 0 : static_cast<std::int64_t>(it->second);
    };
    std::int64_t numerator = 100 * (count(b) * total_a - count(a) * total_b);
    out.push_back({key, static_cast<double>(numerator) / static_cast<double>(total_a * total_b)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PopularityShift& x, const PopularityShift& y) { return x.delta_pp > y.delta_pp; });
  return out;
}

std::vector<PopularityShift> popularity_shift(std::span<const CombatLog> logs, std::string_view era_a,
                                              std::string_view era_b) {
  std::vector<CombatLog> in_a, in_b;
  for (const auto& log : logs) {
    if (log.patch_era == era_a) in_a.push_back(log);
    if (log.patch_era == era_b) in_b.push_back(log);
  }
  return popularity_shift(popularity(in_a, era_a), popularity(in_b, era_b));
}

FairnessDelta fairness_success_delta(std::span<const CombatLog> logs, const BuildKey& build,
                                     const RoleThresholds& thresholds, std::size_t min_n) {
  FairnessDelta out{build};
  if (!logs.empty()) out.encounter_id = logs.front().encounter_id;
  for (const auto& log : logs) {
    if (log.encounter_id != logs.front().encounter_id || log.patch_era != logs.front().patch_era)
      throw Error(ErrorCode::MismatchedContext, log.log_id, "logs must share one encounter and era");
  }
  auto baselines = encounter_baselines(logs);
  const ProfessionSpec target = profession_spec(build);
  std::size_t wins_with = 0, wins_without = 0;
  for (const auto& log : logs) {
    double baseline = baselines.at(log.encounter_id);
    bool present = std::any_of(log.players.begin(), log.players.end(), [&](const PlayerRecord& p) {
      return p.profession_spec() == target && classify(p, baseline, thresholds) == build.role();
    });
    if (present) {
      ++out.n_with;
      wins_with += log.success ? 1 : 0;
    } else {
      ++out.n_without;
      wins_without += log.success ? 1 : 0;
    }
  }
  if (out.n_with < min_n || out.n_without < min_n)
    throw Error(ErrorCode::InsufficientSamples, build.to_string(),
                "n_with=" + std::to_string(out.n_with) + " n_without=" + std::to_string(out.n_without) +
                    " (min_n=" + std::to_string(min_n) + ")");
  out.rate_with = static_cast<double>(wins_with) / static_cast<double>(out.n_with);
  out.rate_without = static_cast<double>(wins_without) / static_cast<double>(out.n_without);
  out.delta = out.rate_with - out.rate_without;
  return out;
}

}  // namespace balance
