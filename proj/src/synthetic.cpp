#include "balance/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "balance/error.hpp"
#include "balance/hash.hpp"
#include "balance/log_codec.hpp"
#include "balance/random.hpp"

namespace balance {

namespace {

using nlohmann::json;

constexpr double kConditionShare = 0.8;
constexpr std::uint64_t kAccountPool = 4096;

std::size_t pick_weighted(Rng& rng, const std::vector<double>& cumulative) {
  double u = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

PlayerRecord make_player(Rng& rng, const SyntheticBuild& build, double max_location, std::uint64_t seed) {
  PlayerRecord p;
  p.account_hash = to_hex(fnv1a64(std::to_string(seed) + ":" + std::to_string(rng.below(kAccountPool))));
  p.profession = build.key.profession();
  if (build.key.has_specialization()) p.specialization = build.key.specialization();
  double z = rng.normal();
  p.dps = build.location * std::exp(build.dispersion * z);
  switch (build.key.role()) {
    case RoleBucket::DamageOverTime:
      p.condition_dps = kConditionShare * p.dps;
      p.power_dps = p.dps - p.condition_dps;
      break;
    case RoleBucket::FullSupport:
      p.power_dps = p.dps;
      p.healing_ps = 2.0 * max_location;
      break;
    case RoleBucket::OffensiveSupport:
      p.power_dps = p.dps;
      p.boon_ps = max_location;
      break;
    case RoleBucket::DirectDamage:
      p.power_dps = p.dps;
      break;
  }
  return p;
}

std::string padded(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%07zu", i);
  return buf;
}

}  // namespace

double SyntheticSpec::weight_in_era(const SyntheticBuild& build, const std::string& era) const {
  auto it = build.era_weights.find(era);
  return it == build.era_weights.end() ? build.popularity_weight : it->second;
}

void validate(const SyntheticSpec& spec) {
  if (spec.builds.empty()) throw Error(ErrorCode::InvalidSpec, "builds", "at least one build required");
  if (spec.eras.empty()) throw Error(ErrorCode::InvalidSpec, "eras", "at least one era required");
  if (spec.encounters.empty()) throw Error(ErrorCode::InvalidSpec, "encounters", "at least one encounter required");
  if (spec.logs_per_era == 0) throw Error(ErrorCode::InvalidSpec, "logs_per_era", "must be >= 1");
  if (spec.players_per_log == 0 || spec.players_per_log > kMaxPlayersPerLog)
    throw Error(ErrorCode::InvalidSpec, "players_per_log", "must be in [1, 10]");
  for (std::size_t i = 0; i < spec.eras.size(); ++i) {
    const auto& era = spec.eras[i];
    std::string field = "eras[" + std::to_string(i) + "]";
    if (!is_safe_identifier(era.label)) throw Error(ErrorCode::InvalidSpec, field + ".label", "unsafe identifier");
    if (era.start_utc >= era.end_utc) throw Error(ErrorCode::InvalidSpec, field, "start_utc must be < end_utc");
    for (std::size_t k = 0; k < i; ++k) {
      if (spec.eras[k].label == era.label || spec.eras[k].overlaps(era))
        throw Error(ErrorCode::InvalidSpec, field, "duplicate or overlapping era");
    }
  }
  for (std::size_t i = 0; i < spec.encounters.size(); ++i) {
    if (!is_safe_identifier(spec.encounters[i]))
      throw Error(ErrorCode::InvalidSpec, "encounters[" + std::to_string(i) + "]", "unsafe identifier");
  }
  for (std::size_t i = 0; i < spec.builds.size(); ++i) {
    const auto& b = spec.builds[i];
    std::string field = "builds[" + std::to_string(i) + "]";
    if (!(b.location > 0.0) || !std::isfinite(b.location))
      throw Error(ErrorCode::InvalidSpec, field + ".location", "must be > 0");
    if (!(b.dispersion >= 0.0) || !std::isfinite(b.dispersion))
      throw Error(ErrorCode::InvalidSpec, field + ".dispersion", "must be >= 0");
    if (!(b.popularity_weight >= 0.0) || !std::isfinite(b.popularity_weight))
      throw Error(ErrorCode::InvalidSpec, field + ".popularity_weight", "must be >= 0");
    if (!(b.success_bonus >= -1.0 && b.success_bonus <= 1.0))
      throw Error(ErrorCode::InvalidSpec, field + ".success_bonus", "must be in [-1, 1]");
    for (const auto& [era, w] : b.era_weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw Error(ErrorCode::InvalidSpec, field + ".era_weights." + era, "must be >= 0");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (spec.builds[k].key == b.key) throw Error(ErrorCode::InvalidSpec, field, "duplicate build key");
    }
  }
  for (const auto& era : spec.eras) {
    double total = 0.0;
    for (const auto& b : spec.builds) total += spec.weight_in_era(b, era.label);
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidSpec, "builds", "popularity weights all zero in era " + era.label);
  }
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  SyntheticCorpus corpus;
  double max_location = 0.0;
  for (const auto& b : spec.builds) max_location = std::max(max_location, b.location);

  auto& manifest = corpus.manifest;
  manifest.seed = spec.seed;
  for (const auto& b : spec.builds) {
    manifest.builds.push_back({b.key, b.location, b.dispersion, b.success_bonus, {}});
  }

  corpus.logs.reserve(spec.eras.size() * spec.logs_per_era);
  for (const auto& era : spec.eras) {
    std::vector<double> cumulative;
    double running = 0.0;
    for (const auto& b : spec.builds) {
      running += spec.weight_in_era(b, era.label);
      cumulative.push_back(running);
    }
    for (std::size_t i = 0; i < spec.builds.size(); ++i) {
      manifest.builds[i].popularity_share[era.label] = spec.weight_in_era(spec.builds[i], era.label) / running;
    }

    const auto span = static_cast<std::uint64_t>(era.end_utc - era.start_utc);
    for (std::size_t i = 0; i < spec.logs_per_era; ++i) {
      CombatLog log;
      log.log_id = "syn-" + std::to_string(spec.seed) + "-" + era.label + "-" + padded(i);
      log.patch_era = era.label;
      log.encounter_id = spec.encounters[rng.below(spec.encounters.size())];
      log.timestamp_utc = era.start_utc + static_cast<std::int64_t>(rng.below(span));
      log.duration_s = 60.0 + std::floor(540.0 * rng.uniform() * 10.0) / 10.0;

      std::set<std::size_t> present;
      for (std::size_t s = 0; s < spec.players_per_log; ++s) {
        std::size_t b = pick_weighted(rng, cumulative);
        present.insert(b);
        log.players.push_back(make_player(rng, spec.builds[b], max_location, spec.seed));
      }
      double bonus = 0.0;
      for (std::size_t b : present) bonus += spec.builds[b].success_bonus;
      double p_success = std::clamp(0.5 + bonus / static_cast<double>(present.size()), 0.05, 0.95);
      log.success = rng.uniform() < p_success;

      manifest.total_slots += log.players.size();
      corpus.logs.push_back(std::move(log));
    }
  }
  manifest.total_logs = corpus.logs.size();

  std::vector<const SyntheticBuild*> by_dispersion;
  for (const auto& b : spec.builds) by_dispersion.push_back(&b);
  std::sort(by_dispersion.begin(), by_dispersion.end(), [](const SyntheticBuild* a, const SyntheticBuild* b) {
    if (a->dispersion != b->dispersion) return a->dispersion < b->dispersion;
    return a->key < b->key;
  });
  for (const auto* b : by_dispersion) manifest.dispersion_order.push_back(b->key);
  return corpus;
}

SyntheticSpec synthetic_spec_from_json(const json& j) {
  auto field_error = [](const std::string& field, const std::string& what) {
    return Error(ErrorCode::InvalidSpec, field, what);
  };
  if (!j.is_object()) throw field_error("$", "expected object");
  SyntheticSpec spec;
  try {
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.logs_per_era = j.at("logs_per_era").get<std::size_t>();
    spec.players_per_log = j.value("players_per_log", std::size_t{10});
    for (const auto& e : j.at("eras")) {
      spec.eras.push_back({e.at("label").get<std::string>(), e.at("start_utc").get<std::int64_t>(),
                           e.at("end_utc").get<std::int64_t>()});
    }
    for (const auto& e : j.at("encounters")) spec.encounters.push_back(e.get<std::string>());
    for (const auto& b : j.at("builds")) {
      std::optional<std::string> spec_name;
      if (b.contains("specialization") && !b.at("specialization").is_null())
        spec_name = b.at("specialization").get<std::string>();
      auto role = parse_role(b.value("role", std::string("direct_damage")));
      if (!role) throw field_error("builds.role", "unknown role");
      std::optional<std::string_view> spec_view;
      if (spec_name) spec_view = *spec_name;
      SyntheticBuild build{make_build_key(b.at("profession").get<std::string>(), spec_view, *role)};
      build.location = b.at("location").get<double>();
      build.dispersion = b.value("dispersion", 0.0);
      build.popularity_weight = b.value("popularity_weight", 1.0);
      build.success_bonus = b.value("success_bonus", 0.0);
      if (b.contains("era_weights")) {
        for (const auto& [era, w] : b.at("era_weights").items()) build.era_weights[era] = w.get<double>();
      }
      spec.builds.push_back(std::move(build));
    }
  } catch (const json::exception& e) {
    throw field_error("$", e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSpec) throw;
    throw field_error(e.field(), e.what());
  }
  validate(spec);
  return spec;
}

json to_json(const SyntheticSpec& spec) {
  json eras = json::array();
  for (const auto& e : spec.eras) eras.push_back({{"label", e.label}, {"start_utc", e.start_utc}, {"end_utc", e.end_utc}});
  json builds = json::array();
  for (const auto& b : spec.builds) {
    json jb = {{"profession", b.key.profession()},
               {"specialization", b.key.has_specialization() ? json(b.key.specialization()) : json(nullptr)},
               {"role", to_string(b.key.role())},
               {"location", b.location},
               {"dispersion", b.dispersion},
               {"popularity_weight", b.popularity_weight},
               {"success_bonus", b.success_bonus}};
    if (!b.era_weights.empty()) jb["era_weights"] = b.era_weights;
    builds.push_back(std::move(jb));
  }
  return {{"seed", spec.seed},          {"logs_per_era", spec.logs_per_era}, {"players_per_log", spec.players_per_log},
          {"eras", std::move(eras)},    {"encounters", spec.encounters},     {"builds", std::move(builds)}};
}

json to_json(const GroundTruthManifest& m) {
  json builds = json::array();
  for (const auto& b : m.builds) {
    builds.push_back({{"build", b.key.to_string()},
                      {"true_median", b.true_median},
                      {"dispersion", b.dispersion},
                      {"success_bonus", b.success_bonus},
                      {"popularity_share", b.popularity_share}});
  }
  json order = json::array();
  for (const auto& k : m.dispersion_order) order.push_back(k.to_string());
  return {{"seed", m.seed},
          {"builds", std::move(builds)},
          {"dispersion_order", std::move(order)},
          {"total_logs", m.total_logs},
          {"total_slots", m.total_slots}};
}

}  // namespace balance
