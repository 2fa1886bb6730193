#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace balance {

using Response = std::optional<int>;  // 1..7, nullopt when missing
using LabelMatrix = std::vector<std::vector<std::optional<int>>>;  // unit x rater

struct SurveyItem {
  std::string id;
  std::string scale;
};

struct SurveyDataset {
  std::vector<SurveyItem> items;
  std::vector<std::string> scales;               // scale names, sorted
  std::vector<std::vector<Response>> responses;  // participant x item
  std::vector<std::set<std::string>> nerf_votes; // per participant, normalized build names
  std::vector<std::set<std::string>> buff_votes;
  std::vector<std::string> raters;
  LabelMatrix coder_labels;                      // coded units x raters

  std::size_t participants() const noexcept { return responses.size(); }
  std::vector<Response> column(std::size_t item) const;
};

// Throws InvalidSurvey: responses outside 1..7, ragged rows, or items whose
// scale is not listed exactly once.
void validate(const SurveyDataset& dataset);

// Inverse standard normal CDF, Wichura's AS241 (PPND16) rational
// approximation; relative error about 1e-16. Throws OutOfRange outside (0, 1).
double normal_quantile(double p);

// Cochran's minimum sample: n0 = ceil(z^2 p (1-p) / margin^2), z the two-sided
// normal quantile for `confidence`; with a population N the finite-population
// correction n = ceil(n0 / (1 + (n0 - 1) / N)) follows. Throws OutOfRange.
std::size_t cochran_min_sample(double confidence, double margin, double p = 0.5,
                               std::optional<std::size_t> population = std::nullopt);

struct LikertSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator
};

// Missing responses are excluded. Throws TooFewResponses below two answers
// and OutOfRange for values outside 1..7.
LikertSummary likert_summary(std::span<const Response> responses);

struct DiscriminantValidity {
  std::vector<std::pair<std::string, double>> per_item;  // item id -> |r_d|, item order
  double overall = 0.0;
};

// For each item: mean over the other scales of |Pearson r| between the item
// and that scale's composite (per-participant mean of its answered items).
// Pairs with a missing side are dropped (pairwise deletion).
// Throws InvalidSurvey (< 2 scales), TooFewParticipants (< 3 pairs) and
// DegenerateColumn (zero variance on either side).
DiscriminantValidity discriminant_validity(const SurveyDataset& dataset);

// Fleiss' kappa over units x raters; categories are whatever ids occur.
// Throws IncompleteMatrix (fewer than 2 units or raters, ragged or missing
// cells) and DegenerateAgreement when expected agreement is 1.
double fleiss_kappa(const LabelMatrix& labels);

struct VoteShare {
  std::string build;
  std::size_t count = 0;
  double share = 0.0;
};

struct VoteTally {
  std::size_t participants = 0;
  std::vector<VoteShare> nerf;  // share descending, then name
  std::vector<VoteShare> buff;
};

// Share of participants naming each build, once per participant and direction.
// Throws EmptyDataset.
VoteTally tally_votes(const SurveyDataset& dataset);

// Tabular survey file: a header line, then one participant per row,
// comma-separated with optional double quotes. Column roles by header:
//   participant       optional identifier, ignored
//   nerf, buff        build names separated by ';'
//   coder:<rater>     category label assigned by that rater to this row
//   anything else     a Likert item; must appear in the scales file
// "NA" or an empty cell is missing. Rows without any coder label are not
// coded units. The scales file is JSON: {"<scale>": ["<item>", ...], ...}.
SurveyDataset parse_survey(std::string_view table, const nlohmann::json& scales);
SurveyDataset load_survey(const std::filesystem::path& data, const std::filesystem::path& scales);

}  // namespace balance
