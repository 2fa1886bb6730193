#include "balance/report.hpp"

#include <algorithm>
#include <map>

#include "balance/distributions.hpp"
#include "balance/error.hpp"

namespace balance {

namespace {

using nlohmann::json;

bool qualifies(const PerformanceDistribution& d, const MetricsConfig& config) {
  return d.n() >= config.dominance.min_n && !(config.exclude_support && is_support(d.key().role()));
}

json era_json(const EraId& e) { return {{"label", e.label}, {"start_utc", e.start_utc}, {"end_utc", e.end_utc}}; }

EraId era_from(const json& j) {
  return {j.at("label").get<std::string>(), j.at("start_utc").get<std::int64_t>(), j.at("end_utc").get<std::int64_t>()};
}

BuildKey key_from(const json& j) {
  auto key = BuildKey::parse(j.get<std::string>());
  if (!key) throw Error(ErrorCode::SchemaViolation, "build", "bad build key " + j.dump());
  return *key;
}

}  // namespace

json to_json(const PopularityTable& t) {
  json shares = json::array();
  for (const auto& [key, count] : t.counts) {
    shares.push_back({{"profession", key.profession},
                      {"specialization", key.specialization},
                      {"count", count},
                      {"share", t.share(key)}});
  }
  return {{"unit", "player_slot"}, {"total_slots", t.total_slots}, {"shares", std::move(shares)}};
}

namespace {

PopularityTable popularity_from(const json& j) {
  PopularityTable t;
  t.total_slots = j.at("total_slots").get<std::size_t>();
  for (const auto& s : j.at("shares")) {
    t.counts[{s.at("profession").get<std::string>(), s.at("specialization").get<std::string>()}] =
        s.at("count").get<std::size_t>();
  }
  return t;
}

}  // namespace

BalanceReport build_balance_report(std::span<const CombatLog> logs, const EraId& era, const MetricsConfig& config,
                                   const std::string& registry_hash,
                                   std::optional<std::pair<EraId, std::span<const CombatLog>>> reference) {
  validate(config.thresholds);
  validate(config.dominance);

  BalanceReport report;
  report.era = era;
  report.registry_hash = registry_hash;
  report.config = config;
  report.log_count = logs.size();
  for (const auto& log : logs) report.slot_count += log.players.size();

  DistributionMap dists = build_distributions(logs, era.label, config.thresholds);
  EncounterDistributions qualifying;
  for (const auto& [key, d] : dists) {
    if (qualifies(d, config)) qualifying[key.encounter_id].emplace(key.build, d);
  }
  if (qualifying.empty())
    throw Error(ErrorCode::InsufficientSamples, era.label,
                "no distribution has n >= min_n (" + std::to_string(config.dominance.min_n) + ")");

  // Symmetry per encounter.
  double normalized_sum = 0.0;
  for (const auto& [encounter, builds] : qualifying) {
    if (builds.size() < 2) continue;
    report.symmetry.push_back({encounter, builds.size(), symmetry_deviation(builds, config.dominance.min_n)});
    normalized_sum += report.symmetry.back().deviation.normalized;
  }
  if (!report.symmetry.empty())
    report.symmetry_aggregate = normalized_sum / static_cast<double>(report.symmetry.size());

  // Difficulty and median performance, aggregated across encounters.
  struct Accumulator {
    double score = 0.0, median = 0.0;
    std::size_t n = 0, encounters = 0;
  };
  std::map<BuildKey, Accumulator> acc;
  for (const auto& [encounter, builds] : qualifying) {
    for (const auto& [key, d] : builds) {
      auto& a = acc[key];
      double w = static_cast<double>(d.n());
      a.score += w * difficulty_score(d, config.difficulty, config.dominance.min_n, config.dominance.trim);
      a.median += w * d.median();
      a.n += d.n();
      ++a.encounters;
    }
  }
  for (const auto& [key, a] : acc) {
    double n = static_cast<double>(a.n);
    report.difficulty.push_back({key, a.score / n, a.n, a.encounters});
    report.performance.push_back({key, a.median / n, a.n});
  }
  std::stable_sort(report.difficulty.begin(), report.difficulty.end(),
                   [](const DifficultyEntry& a, const DifficultyEntry& b) { return a.score > b.score; });

  try {
    report.viability = viability_ranking(qualifying, config.dominance);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoQualifyingPairs) throw;
  }

  report.popularity = popularity(logs, era.label);
  if (reference) {
    report.reference_era = reference->first;
    report.reference_popularity = popularity(reference->second, reference->first.label);
    report.popularity_shift = popularity_shift(*report.reference_popularity, report.popularity);
  }

  // Fairness: every (encounter, build) whose with/without split meets min_n.
  std::map<std::string, std::vector<CombatLog>> by_encounter;
  for (const auto& log : logs) by_encounter[log.encounter_id].push_back(log);
  for (const auto& [key, d] : dists) {
    if (config.exclude_support && is_support(key.build.role())) continue;
    try {
      report.fairness.push_back(fairness_success_delta(by_encounter.at(key.encounter_id), key.build,
                                                       config.thresholds, config.dominance.min_n));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientSamples) throw;
    }
  }

  for (const auto& [key, d] : dists) {
    PerformanceDistribution cloud = subsample(d, config.cloud_cap, config.cloud_seed);
    report.distributions.push_back({key.encounter_id, key.build, d.n(), d.min(), d.q1(), d.median(), d.q3(), d.max(),
                                    qualifies(d, config),
                                    std::vector<double>(cloud.samples().begin(), cloud.samples().end())});
  }
  return report;
}

json to_json(const MetricsConfig& c) {
  return {
      {"roles",
       {{"heal_ratio_min", c.thresholds.heal_ratio_min},
        {"boon_ratio_min", c.thresholds.boon_ratio_min},
        {"condition_share_min", c.thresholds.condition_share_min}}},
      {"dominance",
       {{"mode", to_string(c.dominance.mode)}, {"low_q", c.dominance.low_q}, {"high_q", c.dominance.high_q}}},
      {"min_n", c.dominance.min_n},
      {"trim", {c.dominance.trim.lower, c.dominance.trim.upper}},
      {"difficulty", to_string(c.difficulty)},
      {"exclude_support", c.exclude_support},
      {"cloud_cap", c.cloud_cap},
      {"cloud_seed", c.cloud_seed},
      {"popularity_unit", "player_slot"},
      {"symmetry_aggregation", "unweighted_mean_normalized"},
      {"difficulty_aggregation", "sample_weighted_mean"},
  };
}

json to_json(const BalanceReport& r) {
  json symmetry = json::array();
  for (const auto& s : r.symmetry) {
    symmetry.push_back({{"encounter", s.encounter_id},
                        {"builds", s.builds},
                        {"absolute", s.deviation.absolute},
                        {"normalized", s.deviation.normalized}});
  }
  json difficulty = json::array();
  for (const auto& d : r.difficulty) {
    difficulty.push_back({{"build", d.key.to_string()}, {"score", d.score}, {"n", d.n}, {"encounters", d.encounters}});
  }
  json viability = json::array();
  for (const auto& v : r.viability) {
    json by = json::array();
    for (const auto& o : v.dominated_by) by.push_back({{"encounter", o.encounter_id}, {"dominator", o.dominator.to_string()}});
    viability.push_back({{"build", v.key.to_string()},
                         {"dominated_count", v.dominated_count},
                         {"dominates_count", v.dominates_count},
                         {"dominated_by", std::move(by)}});
  }
  json performance = json::array();
  for (const auto& p : r.performance) {
    performance.push_back({{"build", p.key.to_string()}, {"median_dps", p.median_dps}, {"n", p.n}});
  }
  json shift = nullptr;
  if (r.reference_era) {
    json deltas = json::array();
    for (const auto& s : r.popularity_shift) {
      deltas.push_back({{"profession", s.key.profession}, {"specialization", s.key.specialization}, {"delta_pp", s.delta_pp}});
    }
    shift = {{"reference_era", era_json(*r.reference_era)},
             {"reference_popularity", to_json(*r.reference_popularity)},
             {"deltas", std::move(deltas)}};
  }
  json fairness = json::array();
  for (const auto& f : r.fairness) {
    fairness.push_back({{"build", f.build.to_string()},
                        {"encounter", f.encounter_id},
                        {"delta", f.delta},
                        {"n_with", f.n_with},
                        {"n_without", f.n_without},
                        {"rate_with", f.rate_with},
                        {"rate_without", f.rate_without}});
  }
  json distributions = json::array();
  for (const auto& d : r.distributions) {
    distributions.push_back({{"encounter", d.encounter_id},
                             {"build", d.key.to_string()},
                             {"n", d.n},
                             {"min", d.min},
                             {"q1", d.q1},
                             {"median", d.median},
                             {"q3", d.q3},
                             {"max", d.max},
                             {"qualifies", d.qualifies},
                             {"cloud", d.cloud}});
  }
  return {
      {"format", kReportFormat},
      {"engine_version", kEngineVersion},
      {"era", era_json(r.era)},
      {"era_registry_hash", r.registry_hash},
      {"config", to_json(r.config)},
      {"counts", {{"logs", r.log_count}, {"player_slots", r.slot_count}}},
      {"symmetry",
       {{"per_encounter", std::move(symmetry)},
        {"aggregate_normalized", r.symmetry_aggregate ? json(*r.symmetry_aggregate) : json(nullptr)}}},
      {"difficulty", {{"policy", to_string(r.config.difficulty)}, {"ranking", std::move(difficulty)}}},
      {"viability", {{"ranking", std::move(viability)}}},
      {"performance", std::move(performance)},
      {"popularity", to_json(r.popularity)},
      {"popularity_shift", std::move(shift)},
      {"fairness", {{"caveat", kFairnessCaveat}, {"entries", std::move(fairness)}}},
      {"distributions", std::move(distributions)},
  };
}

MetricsConfig metrics_config_from_json(const json& c, MetricsConfig base) {
  try {
    if (!c.is_object()) throw Error(ErrorCode::SchemaViolation, "config", "expected an object");
    if (c.contains("roles")) {
      const json& r = c.at("roles");
      if (r.contains("heal_ratio_min")) base.thresholds.heal_ratio_min = r.at("heal_ratio_min").get<double>();
      if (r.contains("boon_ratio_min")) base.thresholds.boon_ratio_min = r.at("boon_ratio_min").get<double>();
      if (r.contains("condition_share_min"))
        base.thresholds.condition_share_min = r.at("condition_share_min").get<double>();
    }
    if (c.contains("dominance")) {
      const json& d = c.at("dominance");
      if (d.contains("mode")) {
        auto mode = d.at("mode").get<std::string>();
        if (mode == "strict") base.dominance.mode = DominanceMode::Strict;
        else if (mode == "quantile") base.dominance.mode = DominanceMode::Quantile;
        else throw Error(ErrorCode::SchemaViolation, "config.dominance.mode", "unknown mode " + mode);
      }
      if (d.contains("low_q")) base.dominance.low_q = d.at("low_q").get<double>();
      if (d.contains("high_q")) base.dominance.high_q = d.at("high_q").get<double>();
    }
    if (c.contains("min_n")) base.dominance.min_n = c.at("min_n").get<std::size_t>();
    if (c.contains("trim")) base.dominance.trim = {c.at("trim").at(0).get<double>(), c.at("trim").at(1).get<double>()};
    if (c.contains("difficulty")) {
      auto policy = c.at("difficulty").get<std::string>();
      if (policy == "cv") base.difficulty = DifficultyPolicy::RelativeDispersion;
      else if (policy == "variance") base.difficulty = DifficultyPolicy::RawVariance;
      else throw Error(ErrorCode::SchemaViolation, "config.difficulty", "unknown policy " + policy);
    }
    if (c.contains("exclude_support")) base.exclude_support = c.at("exclude_support").get<bool>();
    if (c.contains("cloud_cap")) base.cloud_cap = c.at("cloud_cap").get<std::size_t>();
    if (c.contains("cloud_seed")) base.cloud_seed = c.at("cloud_seed").get<std::uint64_t>();
    return base;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, "config", e.what());
  }
}

BalanceReport report_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kReportFormat)
      throw Error(ErrorCode::SchemaViolation, "format", "expected " + std::string(kReportFormat));
    BalanceReport r;
    r.era = era_from(j.at("era"));
    r.registry_hash = j.at("era_registry_hash").get<std::string>();

    r.config = metrics_config_from_json(j.at("config"));

    r.log_count = j.at("counts").at("logs").get<std::size_t>();
    r.slot_count = j.at("counts").at("player_slots").get<std::size_t>();

    for (const auto& s : j.at("symmetry").at("per_encounter")) {
      r.symmetry.push_back({s.at("encounter").get<std::string>(), s.at("builds").get<std::size_t>(),
                            {s.at("absolute").get<double>(), s.at("normalized").get<double>()}});
    }
    if (!j.at("symmetry").at("aggregate_normalized").is_null())
      r.symmetry_aggregate = j.at("symmetry").at("aggregate_normalized").get<double>();

    for (const auto& d : j.at("difficulty").at("ranking")) {
      r.difficulty.push_back({key_from(d.at("build")), d.at("score").get<double>(), d.at("n").get<std::size_t>(),
                              d.at("encounters").get<std::size_t>()});
    }
    for (const auto& v : j.at("viability").at("ranking")) {
      ViabilityEntry e{key_from(v.at("build"))};
      e.dominated_count = v.at("dominated_count").get<std::size_t>();
      e.dominates_count = v.at("dominates_count").get<std::size_t>();
      for (const auto& o : v.at("dominated_by")) {
        e.dominated_by.push_back({o.at("encounter").get<std::string>(), key_from(o.at("dominator"))});
      }
      r.viability.push_back(std::move(e));
    }
    for (const auto& p : j.at("performance")) {
      r.performance.push_back({key_from(p.at("build")), p.at("median_dps").get<double>(), p.at("n").get<std::size_t>()});
    }
    r.popularity = popularity_from(j.at("popularity"));
    const json& shift = j.at("popularity_shift");
    if (!shift.is_null()) {
      r.reference_era = era_from(shift.at("reference_era"));
      r.reference_popularity = popularity_from(shift.at("reference_popularity"));
      for (const auto& s : shift.at("deltas")) {
        r.popularity_shift.push_back(
            {{s.at("profession").get<std::string>(), s.at("specialization").get<std::string>()},
             s.at("delta_pp").get<double>()});
      }
    }
    for (const auto& f : j.at("fairness").at("entries")) {
      FairnessDelta d{key_from(f.at("build"))};
      d.encounter_id = f.at("encounter").get<std::string>();
      d.delta = f.at("delta").get<double>();
      d.n_with = f.at("n_with").get<std::size_t>();
      d.n_without = f.at("n_without").get<std::size_t>();
      d.rate_with = f.at("rate_with").get<double>();
      d.rate_without = f.at("rate_without").get<double>();
      r.fairness.push_back(std::move(d));
    }
    for (const auto& d : j.at("distributions")) {
      r.distributions.push_back({d.at("encounter").get<std::string>(), key_from(d.at("build")),
                                 d.at("n").get<std::size_t>(), d.at("min").get<double>(), d.at("q1").get<double>(),
                                 d.at("median").get<double>(), d.at("q3").get<double>(), d.at("max").get<double>(),
                                 d.at("qualifies").get<bool>(), d.at("cloud").get<std::vector<double>>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, "report", e.what());
  }
}

std::string render_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace balance
