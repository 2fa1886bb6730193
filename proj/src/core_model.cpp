#include "balance/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "balance/error.hpp"

namespace balance {

std::string_view to_string(RoleBucket role) noexcept {
  switch (role) {
    case RoleBucket::FullSupport: return "full_support";
    case RoleBucket::OffensiveSupport: return "offensive_support";
    case RoleBucket::DirectDamage: return "direct_damage";
    case RoleBucket::DamageOverTime: return "damage_over_time";
  }
  return "direct_damage";
}

std::optional<RoleBucket> parse_role(std::string_view text) noexcept {
  for (RoleBucket role : kAllRoles) {
    if (to_string(role) == text) return role;
  }
  return std::nullopt;
}

std::string normalize_identifier(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

BuildKey::BuildKey(std::string_view profession, std::optional<std::string_view> specialization,
                   RoleBucket role)
    : profession_(normalize_identifier(profession)),
      specialization_(specialization ? normalize_identifier(*specialization) : std::string{}),
      role_(role) {
  if (profession_.empty()) throw Error(ErrorCode::EmptyProfession, "profession");
}

std::string BuildKey::to_string() const {
  return profession_ + "/" + specialization_ + "/" + std::string(balance::to_string(role_));
}

std::optional<BuildKey> BuildKey::parse(std::string_view text) {
  auto first = text.find('/');
  if (first == std::string_view::npos) return std::nullopt;
  auto second = text.find('/', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  auto role = parse_role(text.substr(second + 1));
  if (!role) return std::nullopt;
  auto profession = text.substr(0, first);
  auto spec = text.substr(first + 1, second - first - 1);
  if (normalize_identifier(profession).empty()) return std::nullopt;
  return BuildKey(profession, spec, *role);
}

BuildKey make_build_key(std::string_view profession, std::optional<std::string_view> specialization,
                        RoleBucket role) {
  return BuildKey(profession, specialization, role);
}

std::string ProfessionSpec::to_string() const { return profession + "/" + specialization; }

ProfessionSpec profession_spec(const BuildKey& key) {
  return {key.profession(), key.specialization()};
}

ProfessionSpec PlayerRecord::profession_spec() const {
  return {normalize_identifier(profession),
          specialization ? normalize_identifier(*specialization) : std::string{}};
}

bool dps_decomposition_holds(const PlayerRecord& r) noexcept {
  double tolerance = std::max(1e-6, 1e-3 * r.dps);
  return std::abs(r.dps - (r.power_dps + r.condition_dps)) <= tolerance;
}

void validate(const PlayerRecord& r, std::string_view path) {
  auto field = [&](std::string_view name) {
    return path.empty() ? std::string(name) : std::string(path) + "." + std::string(name);
  };
  if (normalize_identifier(r.profession).empty())
    throw Error(ErrorCode::InvariantViolation, field("profession"), "blank profession");
  const std::pair<std::string_view, double> rates[] = {
      {"dps", r.dps},
      {"power_dps", r.power_dps},
      {"condition_dps", r.condition_dps},
      {"healing_ps", r.healing_ps},
      {"boon_ps", r.boon_ps},
  };
  for (const auto& [name, value] : rates) {
    if (!std::isfinite(value) || value < 0.0)
      throw Error(ErrorCode::InvariantViolation, field(name), "rate must be finite and non-negative");
  }
  if (!dps_decomposition_holds(r))
    throw Error(ErrorCode::InvariantViolation, field("dps"), "power_dps + condition_dps does not match dps");
}

void validate(const CombatLog& log) {
  if (log.log_id.empty()) throw Error(ErrorCode::InvariantViolation, "log_id", "empty");
  if (log.encounter_id.empty()) throw Error(ErrorCode::InvariantViolation, "encounter_id", "empty");
  if (log.patch_era.empty()) throw Error(ErrorCode::InvariantViolation, "patch_era", "empty");
  if (!std::isfinite(log.duration_s) || log.duration_s <= 0.0)
    throw Error(ErrorCode::InvariantViolation, "duration_s", "must be > 0");
  if (log.players.empty() || log.players.size() > kMaxPlayersPerLog)
    throw Error(ErrorCode::InvariantViolation, "players", "expected 1 to 10 players");
  for (std::size_t i = 0; i < log.players.size(); ++i) {
    validate(log.players[i], "players[" + std::to_string(i) + "]");
  }
}

double interpolated_quantile(std::span<const double> sorted, double q) noexcept {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double h = static_cast<double>(n - 1) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

PerformanceDistribution::PerformanceDistribution(BuildKey key, std::string encounter_id, std::string era,
                                                 std::vector<double> samples)
    : key_(std::move(key)),
      encounter_id_(std::move(encounter_id)),
      era_(std::move(era)),
      samples_(std::move(samples)) {
  if (samples_.empty()) throw Error(ErrorCode::EmptyDistribution, key_.to_string());
  std::sort(samples_.begin(), samples_.end());
  q1_ = interpolated_quantile(samples_, 0.25);
  median_ = interpolated_quantile(samples_, 0.5);
  q3_ = interpolated_quantile(samples_, 0.75);
}

}  // namespace balance
