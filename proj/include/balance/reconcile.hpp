#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "balance/report.hpp"

namespace balance {

// 1-based ranks, ties sharing their average rank.
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson correlation of fractional ranks. Throws LengthMismatch, TooShort
// (fewer than 3 pairs) and DegenerateRanks (a constant input).
double spearman(std::span<const double> xs, std::span<const double> ys);

enum class Alignment { Agree, Disagree, Neutral };
std::string_view to_string(Alignment a) noexcept;

struct AlignmentRow {
  BuildKey key;
  double nerf_share = 0.0;
  double buff_share = 0.0;
  double dps_percentile = 0.0;  // (rank - 1) / (K - 1) of median dps among report builds
  std::size_t dominated_count = 0;
  std::size_t dominates_count = 0;
  std::string direction;  // "nerf", "buff" or "none"
  Alignment verdict = Alignment::Neutral;
};

struct AlignmentTable {
  double vote_floor = 0.05;
  std::vector<AlignmentRow> rows;  // BuildKey order
  std::optional<double> nerf_vs_dps_spearman;
};

inline constexpr std::string_view kAlignmentNote =
    "heuristic operationalization: votes compared with data-driven rankings";

// Vote keys are build names as tallied: "profession", "profession/spec" or
// "profession/spec/role". A report build takes the share of its most
// specific matching key. A build is voted when a share reaches vote_floor;
// the larger share sets the direction, a tie is Neutral.
//   nerf Agrees: dps percentile >= 0.5, or undominated while dominating others
//   buff Agrees: dps percentile <= 0.5, or dominated more than the median build
// Throws InsufficientOverlap when fewer than 3 report builds are voted.
AlignmentTable vote_alignment(const std::map<std::string, double>& nerf_shares,
                              const std::map<std::string, double>& buff_shares, const BalanceReport& report,
                              double vote_floor = 0.05);

enum class RewardFlag { OverRewardedEase, UnderRewardedDifficulty };
std::string_view to_string(RewardFlag f) noexcept;

struct RewardResidual {
  BuildKey key;
  double difficulty = 0.0;
  double median_dps = 0.0;
  double residual = 0.0;  // rank(median dps) - rank(difficulty)
  std::optional<RewardFlag> flag;
};

struct RewardConsistency {
  double rho = 0.0;        // spearman(difficulty, median dps); 1 is the ideal
  double threshold = 0.0;  // R
  std::vector<RewardResidual> residuals;  // BuildKey order
};

// Residual above +R flags over-rewarded ease, below -R under-rewarded
// difficulty. R defaults to K/4. Throws TooFewBuilds below 3 builds.
RewardConsistency difficulty_reward_consistency(const BalanceReport& report,
                                                std::optional<double> threshold = std::nullopt);

nlohmann::json to_json(const AlignmentTable& table);
nlohmann::json to_json(const RewardConsistency& consistency);

}  // namespace balance
