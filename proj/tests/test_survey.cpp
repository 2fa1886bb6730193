#include <doctest.h>

#include <chrono>
#include <random>

#include "balance/survey.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace balance;
using fixtures::error_code;

namespace {

// responses[p][i] with 0 meaning missing; scale_of[i] indexes "s0", "s1", ...
SurveyDataset dataset(const std::vector<std::vector<int>>& responses, const std::vector<int>& scale_of, int scales) {
  SurveyDataset d;
  for (int s = 0; s < scales; ++s) d.scales.push_back("s" + std::to_string(s));
  for (std::size_t i = 0; i < scale_of.size(); ++i)
    d.items.push_back({"i" + std::to_string(i), "s" + std::to_string(scale_of[i])});
  for (const auto& row : responses) {
    std::vector<Response> r;
    for (int v : row) r.push_back(v ? Response(v) : std::nullopt);
    d.responses.push_back(r);
    d.nerf_votes.emplace_back();
    d.buff_votes.emplace_back();
  }
  return d;
}

LabelMatrix labels(const std::vector<std::vector<int>>& m) {
  LabelMatrix out;
  for (const auto& row : m) {
    std::vector<std::optional<int>> r(row.begin(), row.end());
    out.push_back(r);
  }
  return out;
}

std::vector<Response> responses(std::initializer_list<int> values) {
  std::vector<Response> out;
  for (int v : values) out.push_back(v ? Response(v) : std::nullopt);
  return out;
}

}  // namespace

TEST_CASE("normal quantile against high precision values") {
  // 25 significant digits, computed independently
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540053855604431).epsilon(1e-15));
  CHECK(normal_quantile(0.95) == doctest::Approx(1.644853626951472822510732).epsilon(1e-15));
  CHECK(normal_quantile(0.995) == doctest::Approx(2.575829303548900453857483).epsilon(1e-15));
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.025) == doctest::Approx(-normal_quantile(0.975)).epsilon(1e-15));
  CHECK(error_code([] { normal_quantile(0.0); }) == ErrorCode::OutOfRange);
  CHECK(error_code([] { normal_quantile(1.0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("cochran minimum sample") {
  // z^2 / 4 / 0.0025 = 384.1458820694125878...
  CHECK(cochran_min_sample(0.95, 0.05) == 385);
  CHECK(cochran_min_sample(0.95, 1.0 - 1e-9) == 1);
  // 385 / (1 + 384 / N): 384.578 for N = 350000
  CHECK(cochran_min_sample(0.95, 0.05, 0.5, 350000) == 385);
  CHECK(cochran_min_sample(0.95, 0.05, 0.5, 1000) == 279);
  CHECK(cochran_min_sample(0.95, 0.05, 0.5, 5000) == 358);
  CHECK(cochran_min_sample(0.95, 0.05, 0.5, 680) == 247);
  CHECK(cochran_min_sample(0.95, 0.05, 0.5, 100) == 80);
  CHECK(error_code([] { cochran_min_sample(1.0, 0.05); }) == ErrorCode::OutOfRange);
  CHECK(error_code([] { cochran_min_sample(0.95, 0.0); }) == ErrorCode::OutOfRange);
  CHECK(error_code([] { cochran_min_sample(0.95, 0.05, 1.0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("cochran monotonicity") {
  std::size_t prev = SIZE_MAX;
  for (int i = 1; i < 100; ++i) {
    auto n = cochran_min_sample(0.95, i / 100.0);
    CHECK(n <= prev);
    prev = n;
  }
  prev = 0;
  for (int i = 1; i < 100; ++i) {
    auto n = cochran_min_sample(i / 100.0, 0.05);
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("likert examples") {
  auto all7 = likert_summary(responses({7, 7, 7, 7}));
  CHECK(all7.mean == 7.0);
  CHECK(all7.sd == 0.0);
  auto ends = likert_summary(responses({1, 7}));
  CHECK(ends.mean == 4.0);
  CHECK(ends.sd == doctest::Approx(std::sqrt(18.0)).epsilon(1e-15));
  auto missing = likert_summary(responses({4, 0, 6}));
  CHECK(missing.n == 2);
  CHECK(missing.mean == 5.0);
  CHECK(error_code([] { likert_summary(responses({4, 0})); }) == ErrorCode::TooFewResponses);
  CHECK(error_code([] { likert_summary(responses({4, 9})); }) == ErrorCode::OutOfRange);
}

TEST_CASE("likert bounds") {
  std::mt19937 gen(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<Response> r;
    int lo = 8, hi = 0;
    for (int i = 0, n = 2 + static_cast<int>(gen() % 20); i < n; ++i) {
      int v = 1 + static_cast<int>(gen() % (1 + t % 7));
      r.push_back(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    auto s = likert_summary(r);
    CHECK(s.mean >= lo);
    CHECK(s.mean <= hi);
    CHECK((s.sd == 0.0) == (lo == hi));
  }
}

TEST_CASE("discriminant validity matches the brute force oracle") {
  std::mt19937 gen(2);
  for (int t = 0; t < 50; ++t) {
    // 20 participants x 17 items over 4 scales, some missing
    std::vector<int> scale_of(17);
    for (int i = 0; i < 17; ++i) scale_of[i] = i % 4;
    std::vector<std::vector<int>> r(20, std::vector<int>(17));
    for (auto& row : r)
      for (auto& v : row) v = gen() % 10 == 0 ? 0 : 1 + static_cast<int>(gen() % 7);
    auto d = dataset(r, scale_of, 4);
    auto got = discriminant_validity(d);
    auto want = oracle::discriminant(r, scale_of, 4);
    REQUIRE(got.per_item.size() == want.size());
    long double overall = 0;
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(std::abs(got.per_item[i].second - static_cast<double>(want[i])) <= 1e-12);
      CHECK(got.per_item[i].second >= 0.0);
      CHECK(got.per_item[i].second <= 1.0);
      overall += want[i];
    }
    CHECK(std::abs(got.overall - static_cast<double>(overall / want.size())) <= 1e-12);
  }
}

TEST_CASE("discriminant validity of independent columns is near zero") {
  std::mt19937_64 gen(3);
  std::vector<std::vector<int>> r(10000, std::vector<int>(4));
  for (auto& row : r)
    for (auto& v : row) v = 1 + static_cast<int>(gen() % 7);
  auto dv = discriminant_validity(dataset(r, {0, 0, 1, 1}, 2));
  for (const auto& [item, rd] : dv.per_item) CHECK(rd < 0.05);
}

TEST_CASE("an item copied into another scale correlates perfectly") {
  std::mt19937 gen(4);
  std::vector<std::vector<int>> r(30, std::vector<int>(3));
  for (auto& row : r) {
    row[0] = 1 + static_cast<int>(gen() % 7);
    row[1] = 1 + static_cast<int>(gen() % 7);
    row[2] = row[0];  // sole item of scale 1
  }
  auto dv = discriminant_validity(dataset(r, {0, 0, 1}, 2));
  CHECK(dv.per_item[0].second == 1.0);
  CHECK(dv.per_item[2].second < 1.0);
}

TEST_CASE("discriminant validity errors") {
  CHECK(error_code([] { discriminant_validity(dataset({{1, 2}, {2, 3}}, {0, 1}, 2)); }) ==
        ErrorCode::TooFewParticipants);
  CHECK(error_code([] { discriminant_validity(dataset({{1, 2}, {1, 3}, {1, 5}}, {0, 1}, 2)); }) ==
        ErrorCode::DegenerateColumn);
  CHECK(error_code([] { discriminant_validity(dataset({{1, 2}, {2, 3}, {3, 5}}, {0, 0}, 1)); }) ==
        ErrorCode::InvalidSurvey);
  CHECK(error_code([] { discriminant_validity(dataset({{1, 9}, {2, 3}, {3, 5}}, {0, 1}, 2)); }) ==
        ErrorCode::InvalidSurvey);
}

TEST_CASE("fleiss perfect agreement") {
  CHECK(fleiss_kappa(labels({{1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {1, 1, 1}})) == 1.0);
  CHECK(fleiss_kappa(labels({{0, 0}, {5, 5}})) == 1.0);
}

TEST_CASE("fleiss matches the pairwise oracle on random 6x4x3 matrices") {
  std::mt19937 gen(5);
  int checked = 0;
  while (checked < 200) {
    std::vector<std::vector<int>> m(6, std::vector<int>(4));
    for (auto& row : m)
      for (auto& v : row) v = static_cast<int>(gen() % 3);
    std::set<int> used;
    for (auto& row : m) used.insert(row.begin(), row.end());
    if (used.size() < 2) continue;
    CHECK(std::abs(fleiss_kappa(labels(m)) - static_cast<double>(oracle::fleiss(m))) <= 1e-12);
    ++checked;
  }
}

TEST_CASE("fleiss is invariant under relabeling") {
  std::mt19937 gen(6);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<int>> m(8, std::vector<int>(3));
    for (auto& row : m)
      for (auto& v : row) v = static_cast<int>(gen() % 4);
    std::vector<int> perm = {7, 2, 9, 4};
    auto relabeled = m;
    for (auto& row : relabeled)
      for (auto& v : row) v = perm[v];
    double a, b;
    try {
      a = fleiss_kappa(labels(m));
      b = fleiss_kappa(labels(relabeled));
    } catch (const Error&) {
      continue;
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("independent raters agree by chance only") {
  std::mt19937_64 gen(7);
  std::vector<std::vector<int>> m(10000, std::vector<int>(2));
  for (auto& row : m) {
    row[0] = static_cast<int>(gen() % 4);
    row[1] = static_cast<int>(gen() % 4);
  }
  CHECK(std::abs(fleiss_kappa(labels(m))) < 0.05);
}

TEST_CASE("fleiss errors") {
  CHECK(error_code([] { fleiss_kappa(labels({{1, 1}})); }) == ErrorCode::IncompleteMatrix);
  CHECK(error_code([] { fleiss_kappa(labels({{1}, {2}})); }) == ErrorCode::IncompleteMatrix);
  CHECK(error_code([] { fleiss_kappa(labels({{1, 2}, {2}})); }) == ErrorCode::IncompleteMatrix);
  LabelMatrix gap = labels({{1, 2}, {2, 1}});
  gap[1][0].reset();
  CHECK(error_code([&] { fleiss_kappa(gap); }) == ErrorCode::IncompleteMatrix);
  CHECK(error_code([] { fleiss_kappa(labels({{3, 3}, {3, 3}})); }) == ErrorCode::DegenerateAgreement);
}

TEST_CASE("vote tallies") {
  SurveyDataset d = dataset(std::vector<std::vector<int>>(10, std::vector<int>{4}), {0}, 1);
  for (int p = 0; p < 4; ++p) d.nerf_votes[p] = {"x"};
  d.nerf_votes[0].insert("X ");  // same build after normalization
  d.buff_votes[9] = {"y"};
  auto t = tally_votes(d);
  REQUIRE(t.nerf.size() == 1);
  CHECK(t.nerf[0].build == "x");
  CHECK(t.nerf[0].count == 4);
  CHECK(t.nerf[0].share == 0.4);
  CHECK(t.buff[0].share == 0.1);
  CHECK(error_code([] { tally_votes(SurveyDataset{}); }) == ErrorCode::EmptyDataset);
}

TEST_CASE("random votes equal a brute force counter") {
  std::mt19937 gen(8);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 1 + gen() % 40;
    SurveyDataset d = dataset(std::vector<std::vector<int>>(n, std::vector<int>{4}), {0}, 1);
    std::vector<std::vector<std::string>> raw(n);
    for (std::size_t p = 0; p < n; ++p) {
      for (int k = 0, m = static_cast<int>(gen() % 5); k < m; ++k) {
        std::string b = "b" + std::to_string(gen() % 6);
        raw[p].push_back(b);
        d.nerf_votes[p].insert(b);
      }
    }
    auto tally = tally_votes(d);
    for (const auto& v : tally.nerf) {
      std::size_t count = 0;
      for (const auto& listed : raw)
        count += std::find(listed.begin(), listed.end(), v.build) != listed.end();
      CHECK(v.count == count);
      CHECK(v.share == static_cast<double>(count) / static_cast<double>(n));
    }
    for (std::size_t i = 1; i < tally.nerf.size(); ++i) CHECK(tally.nerf[i - 1].share >= tally.nerf[i].share);
  }
}

TEST_CASE("survey file parsing") {
  auto scales = nlohmann::json::parse(R"({"fun": ["f1", "f2"], "bal": ["b1"]})");
  std::string table =
      "participant,b1,f1,f2,nerf,buff,coder:a,coder:b\n"
      "p1,7,NA,3,\"Engineer/Mechanist; weaver\",,x,x\n"
      "p2,,5,4,weaver;weaver,warrior,y,x\n"
      "p3,2,6,1,,,,\n";
  auto d = parse_survey(table, scales);
  CHECK(d.participants() == 3);
  CHECK(d.scales == std::vector<std::string>{"bal", "fun"});
  REQUIRE(d.items.size() == 3);
  CHECK(d.items[0].id == "b1");
  CHECK(d.items[0].scale == "bal");
  CHECK(d.responses[0][0] == 7);
  CHECK_FALSE(d.responses[0][1]);
  CHECK_FALSE(d.responses[1][0]);
  CHECK(d.nerf_votes[0] == std::set<std::string>{"engineer/mechanist", "weaver"});
  CHECK(d.nerf_votes[1] == std::set<std::string>{"weaver"});
  CHECK(d.raters == std::vector<std::string>{"a", "b"});
  REQUIRE(d.coder_labels.size() == 2);
  CHECK(d.coder_labels[0][0] == d.coder_labels[0][1]);
  CHECK(d.coder_labels[1][0] != d.coder_labels[1][1]);

  CHECK(error_code([&] { parse_survey("b1,zz\n1,2\n", scales); }) == ErrorCode::InvalidSurvey);
  CHECK(error_code([&] { parse_survey("b1,f1,f2\n1,2\n", scales); }) == ErrorCode::InvalidSurvey);
  CHECK(error_code([&] { parse_survey("b1,f1,f2\n1,2,x\n", scales); }) == ErrorCode::InvalidSurvey);
  CHECK(error_code([&] { parse_survey("b1,f1,f2\n1,2,8\n", scales); }) == ErrorCode::InvalidSurvey);
}

TEST_CASE("bundled sample survey loads") {
  auto d = load_survey(std::string(BALANCE_TEST_DATA) + "/survey.csv", std::string(BALANCE_TEST_DATA) + "/scales.json");
  CHECK(d.participants() == 40);
  CHECK(d.coder_labels.size() == 25);
  CHECK_NOTHROW(discriminant_validity(d));
  CHECK_NOTHROW(fleiss_kappa(d.coder_labels));
}
