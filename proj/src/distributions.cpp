#include "balance/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "balance/error.hpp"
#include "balance/random.hpp"

namespace balance {

std::map<std::string, double> encounter_baselines(std::span<const CombatLog> logs) {
  std::map<std::string, std::vector<double>> per_encounter;
  for (const auto& log : logs) {
    auto& v = per_encounter[log.encounter_id];
    for (const auto& p : log.players) v.push_back(p.dps);
  }
  std::map<std::string, double> out;
  for (auto& [encounter, v] : per_encounter) {
    std::sort(v.begin(), v.end());
    out[encounter] = std::max(interpolated_quantile(v, 0.5), 1e-9);
  }
  return out;
}

DistributionMap build_distributions(std::span<const CombatLog> logs, const std::string& era,
                                    const RoleThresholds& thresholds) {
  std::vector<CombatLog> in_era;
  std::span<const CombatLog> selected = logs;
  if (std::any_of(logs.begin(), logs.end(), [&](const CombatLog& l) { return l.patch_era != era; })) {
    std::copy_if(logs.begin(), logs.end(), std::back_inserter(in_era),
                 [&](const CombatLog& l) { return l.patch_era == era; });
    selected = in_era;
  }

  auto baselines = encounter_baselines(selected);
  std::map<DistributionKey, std::vector<double>> samples;
  for (const auto& log : selected) {
    double baseline = baselines.at(log.encounter_id);
    for (const auto& p : log.players) {
      RoleBucket role = classify(p, baseline, thresholds);
      BuildKey key(p.profession,
                   p.specialization ? std::optional<std::string_view>(*p.specialization) : std::nullopt, role);
      samples[{log.encounter_id, std::move(key)}].push_back(p.dps);
    }
  }

  DistributionMap out;
  for (auto& [key, values] : samples) {
    out.emplace(key, PerformanceDistribution(key.build, key.encounter_id, era, std::move(values)));
  }
  return out;
}

EncounterDistributions group_by_encounter(const DistributionMap& dists) {
  EncounterDistributions out;
  for (const auto& [key, dist] : dists) out[key.encounter_id].emplace(key.build, dist);
  return out;
}

double quantile(const PerformanceDistribution& dist, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::QOutOfRange, "q", std::to_string(q));
  return interpolated_quantile(dist.samples(), q);
}

PerformanceDistribution trim(const PerformanceDistribution& dist, double lower_q, double upper_q) {
  if (!(lower_q >= 0.0 && lower_q < upper_q && upper_q <= 1.0))
    throw Error(ErrorCode::BadQuantileRange, dist.key().to_string(),
                "need 0 <= lower_q < upper_q <= 1");
  double lo = interpolated_quantile(dist.samples(), lower_q);
  double hi = interpolated_quantile(dist.samples(), upper_q);
  auto s = dist.samples();
  auto first = std::lower_bound(s.begin(), s.end(), lo);
  auto last = std::upper_bound(s.begin(), s.end(), hi);
  std::vector<double> kept;
  if (first < last) kept.assign(first, last);
  else kept.push_back(dist.median());
  return PerformanceDistribution(dist.key(), dist.encounter_id(), dist.era(), std::move(kept));
}

PerformanceDistribution subsample(const PerformanceDistribution& dist, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorCode::OutOfRange, "k", "must be >= 1");
  if (dist.n() <= k) return dist;
  std::vector<double> pool(dist.samples().begin(), dist.samples().end());
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return PerformanceDistribution(dist.key(), dist.encounter_id(), dist.era(), std::move(pool));
}

}  // namespace balance
