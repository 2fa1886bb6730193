#pragma once

#include "balance/core_model.hpp"

namespace balance {

// Ratios against the encounter's median dps. Defaults are engine defaults,
// not measured values; every report echoes the thresholds in use.
struct RoleThresholds {
  double heal_ratio_min = 0.5;       // [0, inf)
  double boon_ratio_min = 0.15;      // [0, 1]
  double condition_share_min = 0.5;  // [0, 1]

  friend bool operator==(const RoleThresholds&, const RoleThresholds&) = default;
};

// Throws OutOfRange for thresholds outside their domains.
void validate(const RoleThresholds& thresholds);

// First matching rung wins:
//   FullSupport       healing_ps >= heal_ratio_min * baseline
//   OffensiveSupport  boon_ps >= boon_ratio_min * baseline
//   DamageOverTime    condition_dps / max(dps, 1e-9) >= condition_share_min
//   DirectDamage      otherwise
// Throws NonPositiveBaseline when encounter_median_dps <= 0.
RoleBucket classify(const PlayerRecord& record, double encounter_median_dps, const RoleThresholds& thresholds = {});

}  // namespace balance
