#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "balance/core_model.hpp"

namespace balance {

struct SyntheticBuild {
  BuildKey key;
  double location = 1.0;           // median dps of the log-normal
  double dispersion = 0.0;         // sigma of log(dps)
  double popularity_weight = 1.0;  // relative slot frequency
  double success_bonus = 0.0;      // in [-1, 1]
  std::map<std::string, double> era_weights;  // per-era override of popularity_weight
};

struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::vector<EraId> eras;
  std::vector<std::string> encounters;
  std::vector<SyntheticBuild> builds;
  std::size_t logs_per_era = 0;
  std::size_t players_per_log = 10;

  double weight_in_era(const SyntheticBuild& build, const std::string& era) const;
};

struct GroundTruthBuild {
  BuildKey key;
  double true_median = 0.0;
  double dispersion = 0.0;
  double success_bonus = 0.0;
  std::map<std::string, double> popularity_share;  // era label -> share of slots
};

struct GroundTruthManifest {
  std::uint64_t seed = 0;
  std::vector<GroundTruthBuild> builds;  // spec order
  std::vector<BuildKey> dispersion_order;  // ascending dispersion, BuildKey tie-break
  std::size_t total_logs = 0;
  std::size_t total_slots = 0;
};

struct SyntheticCorpus {
  std::vector<CombatLog> logs;
  GroundTruthManifest manifest;
};

// Throws InvalidSpec naming the offending field.
void validate(const SyntheticSpec& spec);

// Deterministic in `spec`. Each slot draws its build by popularity weight and
// its dps from LogNormal(log(location), dispersion). A log succeeds with
// probability clamp(0.5 + mean success_bonus over the distinct builds
// present, 0.05, 0.95). Support roles get healing or boon output well above
// the default role thresholds; condition builds carry 80% condition damage.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticSpec& spec);
nlohmann::json to_json(const GroundTruthManifest& manifest);

}  // namespace balance
