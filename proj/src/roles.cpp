#include "balance/roles.hpp"

#include <algorithm>
#include <cmath>

#include "balance/error.hpp"

namespace balance {

void validate(const RoleThresholds& t) {
  if (!(t.heal_ratio_min >= 0.0) || !std::isfinite(t.heal_ratio_min))
    throw Error(ErrorCode::OutOfRange, "heal_ratio_min", "must be in [0, inf)");
  if (!(t.boon_ratio_min >= 0.0 && t.boon_ratio_min <= 1.0))
    throw Error(ErrorCode::OutOfRange, "boon_ratio_min", "must be in [0, 1]");
  if (!(t.condition_share_min >= 0.0 && t.condition_share_min <= 1.0))
    throw Error(ErrorCode::OutOfRange, "condition_share_min", "must be in [0, 1]");
}

RoleBucket classify(const PlayerRecord& r, double baseline, const RoleThresholds& t) {
  if (!(baseline > 0.0)) throw Error(ErrorCode::NonPositiveBaseline, "encounter_median_dps");
  if (r.healing_ps >= t.heal_ratio_min * baseline) return RoleBucket::FullSupport;
  if (r.boon_ps >= t.boon_ratio_min * baseline) return RoleBucket::OffensiveSupport;
  constexpr double kEpsilon = 1e-9;
  if (r.condition_dps / std::max(r.dps, kEpsilon) >= t.condition_share_min) return RoleBucket::DamageOverTime;
  return RoleBucket::DirectDamage;
}

}  // namespace balance
