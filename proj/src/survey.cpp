#include "balance/survey.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "balance/core_model.hpp"
#include "balance/error.hpp"

namespace balance {

namespace {

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
  double s = 0.0;
  for (std::size_t i = N; i-- > 0;) s = s * x + c[i];
  return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

bool zero_variance(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

std::vector<Response> SurveyDataset::column(std::size_t item) const {
  std::vector<Response> out;
  out.reserve(responses.size());
  for (const auto& row : responses) out.push_back(row.at(item));
  return out;
}

void validate(const SurveyDataset& d) {
  std::map<std::string, int> scale_seen;
  for (const auto& s : d.scales) {
    if (++scale_seen[s] > 1) throw Error(ErrorCode::InvalidSurvey, s, "duplicate scale");
  }
  std::set<std::string> ids;
  for (const auto& item : d.items) {
    if (!ids.insert(item.id).second) throw Error(ErrorCode::InvalidSurvey, item.id, "duplicate item");
    if (!scale_seen.count(item.scale)) throw Error(ErrorCode::InvalidSurvey, item.id, "unknown scale " + item.scale);
  }
  for (std::size_t p = 0; p < d.responses.size(); ++p) {
    const auto& row = d.responses[p];
    if (row.size() != d.items.size())
      throw Error(ErrorCode::InvalidSurvey, "row " + std::to_string(p + 1), "ragged response row");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] && (*row[i] < 1 || *row[i] > 7))
        throw Error(ErrorCode::InvalidSurvey, "row " + std::to_string(p + 1) + "." + d.items[i].id,
                    "response outside 1..7");
    }
  }
  if (d.nerf_votes.size() != d.responses.size() || d.buff_votes.size() != d.responses.size())
    throw Error(ErrorCode::InvalidSurvey, "votes", "one vote set per participant required");
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::OutOfRange, "p", "must be in (0, 1)");
  static constexpr std::array<double, 8> a = {
      3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3, 1.3731693765509461125e+4,
      4.5921953931549871457e+4, 6.7265770927008700853e+4, 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr std::array<double, 8> b = {
      1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2, 5.3941960214247511077e+3,
      2.1213794301586595867e+4, 3.9307895800092710610e+4, 2.8729085735721942674e+4, 5.2264952788528545610e+3};
  static constexpr std::array<double, 8> c = {
      1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0, 3.64784832476320460504e0,
      1.27045825245236838258e0, 2.41780725177450611770e-1, 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr std::array<double, 8> d = {
      1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static constexpr std::array<double, 8> e = {
      6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0, 2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3, 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr std::array<double, 8> f = {
      1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7, 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(a, r) / horner(b, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = horner(c, r) / horner(d, r);
  } else {
    r -= 5.0;
    value = horner(e, r) / horner(f, r);
  }
  return q < 0.0 ? -value : value;
}

std::size_t cochran_min_sample(double confidence, double margin, double p, std::optional<std::size_t> population) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error(ErrorCode::OutOfRange, "confidence", "must be in (0, 1)");
  if (!(margin > 0.0 && margin < 1.0)) throw Error(ErrorCode::OutOfRange, "margin", "must be in (0, 1)");
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::OutOfRange, "p", "must be in (0, 1)");
  if (population && *population == 0) throw Error(ErrorCode::OutOfRange, "population", "must be >= 1");

  const double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
  const double raw = z * z * p * (1.0 - p) / (margin * margin);
  // Absorb rounding noise so an exact integer does not round up.
  auto n0 = static_cast<std::size_t>(std::ceil(raw * (1.0 - 1e-12)));
  n0 = std::max<std::size_t>(n0, 1);
  if (!population) return n0;
  const double n0d = static_cast<double>(n0);
  const double corrected = n0d / (1.0 + (n0d - 1.0) / static_cast<double>(*population));
  return std::max<std::size_t>(static_cast<std::size_t>(std::ceil(corrected * (1.0 - 1e-12))), 1);
}

LikertSummary likert_summary(std::span<const Response> responses) {
  std::vector<double> v;
  for (const auto& r : responses) {
    if (!r) continue;
    if (*r < 1 || *r > 7) throw Error(ErrorCode::OutOfRange, "response", std::to_string(*r) + " outside 1..7");
    v.push_back(*r);
  }
  if (v.size() < 2) throw Error(ErrorCode::TooFewResponses, "", std::to_string(v.size()) + " answered");
  LikertSummary s;
  s.n = v.size();
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(s.n);
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  return s;
}

DiscriminantValidity discriminant_validity(const SurveyDataset& d) {
  validate(d);
  if (d.scales.size() < 2) throw Error(ErrorCode::InvalidSurvey, "scales", "need at least two scales");
  for (const auto& s : d.scales) {
    if (std::none_of(d.items.begin(), d.items.end(), [&](const SurveyItem& i) { return i.scale == s; }))
      throw Error(ErrorCode::InvalidSurvey, s, "scale has no items");
  }

  // composite[scale][participant]
  std::map<std::string, std::vector<std::optional<double>>> composite;
  for (const auto& s : d.scales) {
    auto& col = composite[s];
    for (const auto& row : d.responses) {
      double sum = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < d.items.size(); ++i) {
        if (d.items[i].scale == s && row[i]) {
          sum += *row[i];
          ++count;
        }
      }
      col.push_back(count ? std::optional<double>(sum / count) : std::nullopt);
    }
  }

  DiscriminantValidity out;
  double total = 0.0;
  for (std::size_t i = 0; i < d.items.size(); ++i) {
    const auto& item = d.items[i];
    double sum_abs = 0.0;
    int others = 0;
    for (const auto& s : d.scales) {
      if (s == item.scale) continue;
      std::vector<double> x, y;
      for (std::size_t p = 0; p < d.responses.size(); ++p) {
        if (d.responses[p][i] && composite[s][p]) {
          x.push_back(*d.responses[p][i]);
          y.push_back(*composite[s][p]);
        }
      }
      if (x.size() < 3)
        throw Error(ErrorCode::TooFewParticipants, item.id + " vs " + s, std::to_string(x.size()) + " complete pairs");
      if (zero_variance(x)) throw Error(ErrorCode::DegenerateColumn, item.id);
      if (zero_variance(y)) throw Error(ErrorCode::DegenerateColumn, s);
      sum_abs += std::min(1.0, std::abs(pearson(x, y)));
      ++others;
    }
    double rd = sum_abs / others;
    out.per_item.emplace_back(item.id, rd);
    total += rd;
  }
  out.overall = total / static_cast<double>(d.items.size());
  return out;
}

double fleiss_kappa(const LabelMatrix& labels) {
  const std::size_t units = labels.size();
  if (units < 2) throw Error(ErrorCode::IncompleteMatrix, "", "need at least 2 units");
  const std::size_t raters = labels.front().size();
  if (raters < 2) throw Error(ErrorCode::IncompleteMatrix, "", "need at least 2 raters");

  std::map<int, std::size_t> category_totals;
  double agreement_sum = 0.0;
  const double r = static_cast<double>(raters);
  for (std::size_t u = 0; u < units; ++u) {
    if (labels[u].size() != raters)
      throw Error(ErrorCode::IncompleteMatrix, "unit " + std::to_string(u), "ragged row");
    std::map<int, std::size_t> counts;
    for (const auto& cell : labels[u]) {
      if (!cell) throw Error(ErrorCode::IncompleteMatrix, "unit " + std::to_string(u), "missing label");
      ++counts[*cell];
      ++category_totals[*cell];
    }
    double squares = 0.0;
    for (const auto& [cat, n] : counts) squares += static_cast<double>(n * n);
    agreement_sum += (squares - r) / (r * (r - 1.0));
  }
  const double p_bar = agreement_sum / static_cast<double>(units);
  double p_e = 0.0;
  const double cells = static_cast<double>(units * raters);
  for (const auto& [cat, n] : category_totals) {
    double pj = static_cast<double>(n) / cells;
    p_e += pj * pj;
  }
  if (category_totals.size() < 2 || p_e >= 1.0)
    throw Error(ErrorCode::DegenerateAgreement, "", "expected agreement is 1; kappa undefined");
  return (p_bar - p_e) / (1.0 - p_e);
}

VoteTally tally_votes(const SurveyDataset& d) {
  if (d.participants() == 0) throw Error(ErrorCode::EmptyDataset, "");
  VoteTally tally;
  tally.participants = d.participants();
  auto count = [&](const std::vector<std::set<std::string>>& votes) {
    std::map<std::string, std::size_t> counts;
    for (const auto& set : votes) {
      std::set<std::string> normalized;
      for (const auto& b : set) {
        auto n = normalize_identifier(b);
        if (!n.empty()) normalized.insert(std::move(n));
      }
      for (const auto& b : normalized) ++counts[b];
    }
    std::vector<VoteShare> out;
    for (const auto& [build, c] : counts) {
      out.push_back({build, c, static_cast<double>(c) / static_cast<double>(tally.participants)});
    }
    std::stable_sort(out.begin(), out.end(), [](const VoteShare& a, const VoteShare& b) { return a.count > b.count; });
    return out;
  };
  tally.nerf = count(d.nerf_votes);
  tally.buff = count(d.buff_votes);
  return tally;
}

}  // namespace balance
