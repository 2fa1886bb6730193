#include "balance/log_codec.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "balance/error.hpp"

namespace balance {

namespace {

using nlohmann::json;

// Valid records nest three levels deep; anything far deeper is rejected
// before the JSON parser recurses into it.
constexpr int kMaxNesting = 8;

bool nesting_within_limit(std::string_view line) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (char c : line) {
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') {
      if (++depth > kMaxNesting) return false;
    } else if (c == '}' || c == ']') {
      --depth;
    }
  }
  return true;
}

void reject_unknown_fields(const json& object, std::span<const std::string_view> known,
                           const std::string& prefix) {
  for (const auto& [name, value] : object.items()) {
    bool found = false;
    for (auto k : known) found = found || k == name;
    if (!found) throw Error(ErrorCode::SchemaViolation, prefix + name, "unknown field");
  }
}

const json& require(const json& object, const char* name, const std::string& prefix) {
  auto it = object.find(name);
  if (it == object.end()) throw Error(ErrorCode::SchemaViolation, prefix + name, "missing field");
  return *it;
}

std::string get_string(const json& object, const char* name, const std::string& prefix) {
  const json& v = require(object, name, prefix);
  if (!v.is_string()) throw Error(ErrorCode::SchemaViolation, prefix + name, "expected string");
  return v.get<std::string>();
}

double get_number(const json& object, const char* name, const std::string& prefix) {
  const json& v = require(object, name, prefix);
  if (!v.is_number()) throw Error(ErrorCode::SchemaViolation, prefix + name, "expected number");
  double value = v.get<double>();
  if (!std::isfinite(value)) throw Error(ErrorCode::InvariantViolation, prefix + name, "not finite");
  return value;
}

std::int64_t get_integer(const json& object, const char* name, const std::string& prefix) {
  const json& v = require(object, name, prefix);
  if (v.is_number_integer() && !v.is_number_unsigned()) return v.get<std::int64_t>();
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      return static_cast<std::int64_t>(u);
    throw Error(ErrorCode::InvariantViolation, prefix + name, "integer out of range");
  }
  throw Error(ErrorCode::SchemaViolation, prefix + name, "expected integer");
}

bool get_bool(const json& object, const char* name, const std::string& prefix) {
  const json& v = require(object, name, prefix);
  if (!v.is_boolean()) throw Error(ErrorCode::SchemaViolation, prefix + name, "expected boolean");
  return v.get<bool>();
}

constexpr std::array<std::string_view, 7> kLogFields = {
    "log_id", "encounter_id", "patch_era", "timestamp_utc", "success", "duration_s", "players"};
constexpr std::array<std::string_view, 8> kPlayerFields = {
    "account_hash", "profession", "specialization", "dps", "power_dps", "condition_dps",
    "healing_ps", "boon_ps"};

PlayerRecord parse_player(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, prefix.substr(0, prefix.size() - 1), "expected object");
  reject_unknown_fields(j, kPlayerFields, prefix);
  PlayerRecord p;
  p.account_hash = get_string(j, "account_hash", prefix);
  p.profession = get_string(j, "profession", prefix);
  const json& spec = require(j, "specialization", prefix);
  if (spec.is_string()) {
    auto s = spec.get<std::string>();
    if (!s.empty()) p.specialization = std::move(s);
  } else if (!spec.is_null()) {
    throw Error(ErrorCode::SchemaViolation, prefix + "specialization", "expected string or null");
  }
  p.dps = get_number(j, "dps", prefix);
  p.power_dps = get_number(j, "power_dps", prefix);
  p.condition_dps = get_number(j, "condition_dps", prefix);
  p.healing_ps = get_number(j, "healing_ps", prefix);
  p.boon_ps = get_number(j, "boon_ps", prefix);
  return p;
}

}  // namespace

bool is_safe_identifier(std::string_view id) noexcept {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
              c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

CombatLog parse_log_line(std::string_view line) {
  if (!nesting_within_limit(line)) throw Error(ErrorCode::MalformedRecord, "", "nesting too deep");
  json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::MalformedRecord, "", "not a JSON value");
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "$", "expected object");
  reject_unknown_fields(j, kLogFields, "");

  CombatLog log;
  log.log_id = get_string(j, "log_id", "");
  log.encounter_id = get_string(j, "encounter_id", "");
  log.patch_era = get_string(j, "patch_era", "");
  log.timestamp_utc = get_integer(j, "timestamp_utc", "");
  log.success = get_bool(j, "success", "");
  log.duration_s = get_number(j, "duration_s", "");
  const json& players = require(j, "players", "");
  if (!players.is_array()) throw Error(ErrorCode::SchemaViolation, "players", "expected array");
  log.players.reserve(players.size());
  for (std::size_t i = 0; i < players.size(); ++i) {
    log.players.push_back(parse_player(players[i], "players[" + std::to_string(i) + "]."));
  }

  validate(log);
  if (!is_safe_identifier(log.encounter_id))
    throw Error(ErrorCode::InvariantViolation, "encounter_id", "must match [A-Za-z0-9_.-]+");
  if (!is_safe_identifier(log.patch_era))
    throw Error(ErrorCode::InvariantViolation, "patch_era", "must match [A-Za-z0-9_.-]+");
  return log;
}

std::string serialize_log(const CombatLog& log) {
  json players = json::array();
  for (const auto& p : log.players) {
    players.push_back({
        {"account_hash", p.account_hash},
        {"profession", p.profession},
        {"specialization", p.specialization ? json(*p.specialization) : json(nullptr)},
        {"dps", p.dps},
        {"power_dps", p.power_dps},
        {"condition_dps", p.condition_dps},
        {"healing_ps", p.healing_ps},
        {"boon_ps", p.boon_ps},
    });
  }
  json j = {
      {"log_id", log.log_id},
      {"encounter_id", log.encounter_id},
      {"patch_era", log.patch_era},
      {"timestamp_utc", log.timestamp_utc},
      {"success", log.success},
      {"duration_s", log.duration_s},
      {"players", std::move(players)},
  };
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace balance
