#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace balance {

enum class RoleBucket { FullSupport, OffensiveSupport, DirectDamage, DamageOverTime };

inline constexpr RoleBucket kAllRoles[] = {RoleBucket::FullSupport, RoleBucket::OffensiveSupport,
                                           RoleBucket::DirectDamage, RoleBucket::DamageOverTime};

// snake_case names used in every file format ("full_support", ...).
std::string_view to_string(RoleBucket role) noexcept;
std::optional<RoleBucket> parse_role(std::string_view text) noexcept;

constexpr bool is_support(RoleBucket role) noexcept {
  return role == RoleBucket::FullSupport || role == RoleBucket::OffensiveSupport;
}

// Trimmed, lowercased copy. Identifiers from community uploads arrive in any case.
std::string normalize_identifier(std::string_view text);

class BuildKey {
 public:
  // Throws Error(EmptyProfession) when the profession is blank after trimming.
  BuildKey(std::string_view profession, std::optional<std::string_view> specialization, RoleBucket role);

  const std::string& profession() const noexcept { return profession_; }
  // Empty when the build has no specialization.
  const std::string& specialization() const noexcept { return specialization_; }
  bool has_specialization() const noexcept { return !specialization_.empty(); }
  RoleBucket role() const noexcept { return role_; }

  // "profession/specialization/role"; the specialization slot is empty for core builds.
  std::string to_string() const;
  static std::optional<BuildKey> parse(std::string_view text);

  friend bool operator==(const BuildKey& a, const BuildKey& b) noexcept { return a.tie() == b.tie(); }
  friend auto operator<=>(const BuildKey& a, const BuildKey& b) noexcept { return a.tie() <=> b.tie(); }

 private:
  std::tuple<const std::string&, const std::string&, RoleBucket> tie() const noexcept {
    return {profession_, specialization_, role_};
  }

  std::string profession_;
  std::string specialization_;
  RoleBucket role_;
};

BuildKey make_build_key(std::string_view profession, std::optional<std::string_view> specialization,
                        RoleBucket role);

// Role-free identity used for popularity and vote matching.
struct ProfessionSpec {
  std::string profession;
  std::string specialization;

  std::string to_string() const;
  friend auto operator<=>(const ProfessionSpec&, const ProfessionSpec&) = default;
};

ProfessionSpec profession_spec(const BuildKey& key);

struct PlayerRecord {
  std::string account_hash;
  std::string profession;
  std::optional<std::string> specialization;
  double dps = 0.0;
  double power_dps = 0.0;
  double condition_dps = 0.0;
  double healing_ps = 0.0;
  double boon_ps = 0.0;

  ProfessionSpec profession_spec() const;
  friend bool operator==(const PlayerRecord&, const PlayerRecord&) = default;
};

// |dps - (power + condition)| <= max(1e-6, 1e-3 * dps)
bool dps_decomposition_holds(const PlayerRecord& record) noexcept;

// Throws Error(InvariantViolation) naming the first offending field as `path.field`.
void validate(const PlayerRecord& record, std::string_view path = {});

struct EraId {
  std::string label;
  std::int64_t start_utc = 0;
  std::int64_t end_utc = 0;  // exclusive

  bool contains(std::int64_t t) const noexcept { return t >= start_utc && t < end_utc; }
  bool overlaps(const EraId& other) const noexcept {
    return start_utc < other.end_utc && other.start_utc < end_utc;
  }
  friend bool operator==(const EraId&, const EraId&) = default;
};

struct CombatLog {
  std::string log_id;
  std::string encounter_id;
  std::string patch_era;  // era label; resolved against the store's registry
  std::int64_t timestamp_utc = 0;
  bool success = false;
  double duration_s = 0.0;
  std::vector<PlayerRecord> players;

  friend bool operator==(const CombatLog&, const CombatLog&) = default;
};

inline constexpr std::size_t kMaxPlayersPerLog = 10;

void validate(const CombatLog& log);

// Linear interpolation between closest ranks over an ascending range:
// h = (n-1)q, result = s[floor h] + frac(h) * (s[floor h + 1] - s[floor h]).
// Callers guarantee a non-empty range and q in [0, 1].
double interpolated_quantile(std::span<const double> sorted, double q) noexcept;

// Sorted dps samples of one build on one encounter within one era.
class PerformanceDistribution {
 public:
  // Sorts `samples`. Throws Error(EmptyDistribution) when empty.
  PerformanceDistribution(BuildKey key, std::string encounter_id, std::string era,
                          std::vector<double> samples);

  const BuildKey& key() const noexcept { return key_; }
  const std::string& encounter_id() const noexcept { return encounter_id_; }
  const std::string& era() const noexcept { return era_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t n() const noexcept { return samples_.size(); }

  double min() const noexcept { return samples_.front(); }
  double max() const noexcept { return samples_.back(); }
  double q1() const noexcept { return q1_; }
  double median() const noexcept { return median_; }
  double q3() const noexcept { return q3_; }

 private:
  BuildKey key_;
  std::string encounter_id_;
  std::string era_;
  std::vector<double> samples_;
  double q1_;
  double median_;
  double q3_;
};

}  // namespace balance
