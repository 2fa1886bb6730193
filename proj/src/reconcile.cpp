#include "balance/reconcile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "balance/error.hpp"

namespace balance {

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw Error(ErrorCode::LengthMismatch, "", std::to_string(xs.size()) + " vs " + std::to_string(ys.size()));
  if (xs.size() < 3) throw Error(ErrorCode::TooShort, "", "need at least 3 pairs");
  auto rx = fractional_ranks(xs);
  auto ry = fractional_ranks(ys);
  const double mean = (static_cast<double>(xs.size()) + 1.0) / 2.0;  // mean of any rank vector
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
    sxy += (rx[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateRanks, "", "constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string_view to_string(Alignment a) noexcept {
  switch (a) {
    case Alignment::Agree: return "agree";
    case Alignment::Disagree: return "disagree";
    case Alignment::Neutral: return "neutral";
  }
  return "neutral";
}

std::string_view to_string(RewardFlag f) noexcept {
  return f == RewardFlag::OverRewardedEase ? "over_rewarded_ease" : "under_rewarded_difficulty";
}

namespace {

double lookup_share(const std::map<std::string, double>& shares, const BuildKey& key) {
  std::vector<std::string> candidates{key.to_string()};
  if (key.has_specialization())
    candidates.push_back(key.profession() + "/" + key.specialization());
  else
    candidates.push_back(key.profession());
  for (const auto& c : candidates) {
    auto it = shares.find(c);
    if (it != shares.end()) return it->second;
  }
  return 0.0;
}

std::map<std::string, double> normalized(const std::map<std::string, double>& shares) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : shares) out[normalize_identifier(k)] = v;
  return out;
}

}  // namespace

AlignmentTable vote_alignment(const std::map<std::string, double>& nerf_in, const std::map<std::string, double>& buff_in,
                              const BalanceReport& report, double vote_floor) {
  if (!(vote_floor >= 0.0 && vote_floor <= 1.0)) throw Error(ErrorCode::OutOfRange, "vote_floor", "must be in [0, 1]");
  auto nerf = normalized(nerf_in);
  auto buff = normalized(buff_in);

  std::vector<double> medians;
  for (const auto& p : report.performance) medians.push_back(p.median_dps);
  auto ranks = fractional_ranks(medians);
  const double k = static_cast<double>(medians.size());

  std::map<BuildKey, const ViabilityEntry*> viability;
  std::vector<double> dominated_counts;
  for (const auto& v : report.viability) {
    viability.emplace(v.key, &v);
    dominated_counts.push_back(static_cast<double>(v.dominated_count));
  }
  double median_dominated = 0.0;
  if (!dominated_counts.empty()) {
    std::sort(dominated_counts.begin(), dominated_counts.end());
    median_dominated = interpolated_quantile(dominated_counts, 0.5);
  }

  AlignmentTable table;
  table.vote_floor = vote_floor;
  std::size_t voted = 0;
  for (std::size_t i = 0; i < report.performance.size(); ++i) {
    const auto& key = report.performance[i].key;
    AlignmentRow row{key};
    row.nerf_share = lookup_share(nerf, key);
    row.buff_share = lookup_share(buff, key);
    if (row.nerf_share <= 0.0 && row.buff_share <= 0.0) continue;
    row.dps_percentile = k > 1.0 ? (ranks[i] - 1.0) / (k - 1.0) : 0.5;
    if (auto it = viability.find(key); it != viability.end()) {
      row.dominated_count = it->second->dominated_count;
      row.dominates_count = it->second->dominates_count;
    }
    bool above_floor = row.nerf_share >= vote_floor || row.buff_share >= vote_floor;
    if (above_floor) ++voted;
    if (!above_floor || row.nerf_share == row.buff_share) {
      row.direction = "none";
      row.verdict = Alignment::Neutral;
    } else if (row.nerf_share > row.buff_share) {
      row.direction = "nerf";
      bool agree = row.dps_percentile >= 0.5 || (row.dominated_count == 0 && row.dominates_count > 0);
      row.verdict = agree ? Alignment::Agree : Alignment::Disagree;
    } else {
      row.direction = "buff";
      bool agree = row.dps_percentile <= 0.5 || static_cast<double>(row.dominated_count) > median_dominated;
      row.verdict = agree ? Alignment::Agree : Alignment::Disagree;
    }
    table.rows.push_back(std::move(row));
  }
  if (voted < 3)
    throw Error(ErrorCode::InsufficientOverlap, "", std::to_string(voted) + " report build(s) reach the vote floor");

  std::vector<double> shares, percentiles;
  for (const auto& r : table.rows) {
    shares.push_back(r.nerf_share);
    percentiles.push_back(r.dps_percentile);
  }
  try {
    table.nerf_vs_dps_spearman = spearman(shares, percentiles);
  } catch (const Error&) {
    table.nerf_vs_dps_spearman.reset();
  }
  return table;
}

RewardConsistency difficulty_reward_consistency(const BalanceReport& report, std::optional<double> threshold) {
  std::map<BuildKey, double> medians;
  for (const auto& p : report.performance) medians.emplace(p.key, p.median_dps);
  std::map<BuildKey, double> difficulty;
  for (const auto& d : report.difficulty) {
    if (medians.count(d.key)) difficulty.emplace(d.key, d.score);
  }
  if (difficulty.size() < 3)
    throw Error(ErrorCode::TooFewBuilds, "", std::to_string(difficulty.size()) + " build(s) with both metrics");

  std::vector<double> diff, dps;
  for (const auto& [key, score] : difficulty) {
    diff.push_back(score);
    dps.push_back(medians.at(key));
  }
  RewardConsistency out;
  out.rho = spearman(diff, dps);
  out.threshold = threshold.value_or(static_cast<double>(diff.size()) / 4.0);
  auto diff_ranks = fractional_ranks(diff);
  auto dps_ranks = fractional_ranks(dps);
  std::size_t i = 0;
  for (const auto& [key, score] : difficulty) {
    RewardResidual r{key, score, dps[i], dps_ranks[i] - diff_ranks[i]};
    if (r.residual > out.threshold) r.flag = RewardFlag::OverRewardedEase;
    else if (r.residual < -out.threshold) r.flag = RewardFlag::UnderRewardedDifficulty;
    out.residuals.push_back(std::move(r));
    ++i;
  }
  return out;
}

nlohmann::json to_json(const AlignmentTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"build", r.key.to_string()},
                    {"nerf_share", r.nerf_share},
                    {"buff_share", r.buff_share},
                    {"dps_percentile", r.dps_percentile},
                    {"dominated_count", r.dominated_count},
                    {"dominates_count", r.dominates_count},
                    {"direction", r.direction},
                    {"verdict", to_string(r.verdict)}});
  }
  return {{"note", kAlignmentNote},
          {"vote_floor", t.vote_floor},
          {"rows", std::move(rows)},
          {"nerf_vs_dps_spearman", t.nerf_vs_dps_spearman ? nlohmann::json(*t.nerf_vs_dps_spearman) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const RewardConsistency& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.residuals) {
    rows.push_back({{"build", r.key.to_string()},
                    {"difficulty", r.difficulty},
                    {"median_dps", r.median_dps},
                    {"residual", r.residual},
                    {"flag", r.flag ? nlohmann::json(to_string(*r.flag)) : nlohmann::json(nullptr)}});
  }
  return {{"rho", c.rho}, {"threshold", c.threshold}, {"residuals", std::move(rows)}};
}

}  // namespace balance
