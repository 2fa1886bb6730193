#include <doctest.h>

#include <random>

#include "balance/balance_metrics.hpp"
#include "balance/distributions.hpp"
#include "balance/synthetic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace balance;
using fixtures::dist;
using fixtures::error_code;
using fixtures::key;

namespace {

std::map<BuildKey, PerformanceDistribution> encounter(const std::vector<std::vector<double>>& builds) {
  std::map<BuildKey, PerformanceDistribution> m;
  for (std::size_t i = 0; i < builds.size(); ++i)
    m.emplace(key("b" + std::to_string(i)), dist(builds[i], "b" + std::to_string(i)));
  return m;
}

std::vector<double> scaled(std::vector<double> v, double c) {
  for (auto& x : v) x *= c;
  return v;
}

DominancePolicy strict(TrimRange trim = {0.0, 1.0}, std::size_t min_n = 2) {
  DominancePolicy p;
  p.mode = DominanceMode::Strict;
  p.trim = trim;
  p.min_n = min_n;
  return p;
}

PlayerRecord player(const std::string& prof, double dps = 100.0) { return fixtures::damage_player(prof, std::nullopt, dps); }

}  // namespace

TEST_CASE("equal medians give exact zero deviation") {
  auto dev = symmetry_deviation(encounter({{9, 10, 11}, {10, 10, 10}}), 2);
  CHECK(dev.absolute == 0.0);
  CHECK(dev.normalized == 0.0);
}

TEST_CASE("medians 10 and 20") {
  auto dev = symmetry_deviation(encounter({{10, 10}, {20, 20}}), 2);
  CHECK(dev.absolute == 25.0);
  CHECK(dev.normalized == doctest::Approx(25.0 / 225.0).epsilon(1e-15));
}

TEST_CASE("symmetry under scaling") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(1, 100);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> builds(2 + gen() % 5);
    for (auto& b : builds) {
      b.resize(20 + gen() % 10);
      for (auto& v : b) v = u(gen);
    }
    auto base = symmetry_deviation(encounter(builds));
    for (double c : {0.5, 3.0, 100.0}) {
      std::vector<std::vector<double>> s;
      for (const auto& b : builds) s.push_back(scaled(b, c));
      auto dev = symmetry_deviation(encounter(s));
      CHECK(dev.normalized == doctest::Approx(base.normalized).epsilon(1e-9));
      CHECK(dev.absolute == doctest::Approx(base.absolute * c * c).epsilon(1e-9));
    }
  }
}

TEST_CASE("symmetry errors") {
  CHECK(error_code([] { symmetry_deviation(encounter({{1, 2}}), 2); }) == ErrorCode::TooFewBuilds);
  auto m = encounter({{1, 2, 3}, {1}, {2}});
  try {
    symmetry_deviation(m, 2);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
    CHECK(e.field() == "b1//direct_damage,b2//direct_damage");
  }
}

TEST_CASE("difficulty on constant and two point samples") {
  std::vector<double> constant(30, 42.0);
  CHECK(difficulty_score(dist(constant), DifficultyPolicy::RawVariance) == 0.0);
  CHECK(difficulty_score(dist(constant), DifficultyPolicy::RelativeDispersion) == 0.0);
  TrimRange all{0.0, 1.0};
  CHECK(difficulty_score(dist({8, 12}), DifficultyPolicy::RawVariance, 2, all) == 8.0);
  CHECK(difficulty_score(dist({8, 12}), DifficultyPolicy::RelativeDispersion, 2, all) ==
        doctest::Approx(std::sqrt(8.0) / 10.0).epsilon(1e-15));
}

TEST_CASE("difficulty errors") {
  CHECK(error_code([] { difficulty_score(dist({1, 2, 3}), DifficultyPolicy::RawVariance, 20); }) ==
        ErrorCode::InsufficientSamples);
  CHECK(error_code([] { difficulty_score(dist({0, 0, 0, 1}), DifficultyPolicy::RelativeDispersion, 2); }) ==
        ErrorCode::ZeroMedian);
  CHECK_NOTHROW(difficulty_score(dist({0, 0, 0, 1}), DifficultyPolicy::RawVariance, 2));
}

TEST_CASE("difficulty under scaling") {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(1, 100);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(20 + gen() % 50);
    for (auto& v : s) v = u(gen);
    double cv = difficulty_score(dist(s));
    double var = difficulty_score(dist(s), DifficultyPolicy::RawVariance);
    for (double c : {0.5, 3.0, 100.0}) {
      CHECK(difficulty_score(dist(scaled(s, c))) == doctest::Approx(cv).epsilon(1e-9));
      CHECK(difficulty_score(dist(scaled(s, c)), DifficultyPolicy::RawVariance) ==
            doctest::Approx(var * c * c).epsilon(1e-9));
    }
  }
}

TEST_CASE("difficulty follows dispersion on synthetic builds") {
  SyntheticSpec spec;
  spec.seed = 5;
  spec.eras = {{"e", 0, 10}};
  spec.encounters = {"x"};
  spec.logs_per_era = 300;
  for (double sigma : {0.4, 0.1, 0.2}) {
    SyntheticBuild b{key("s" + std::to_string(static_cast<int>(sigma * 10)))};
    b.location = 20000;
    b.dispersion = sigma;
    spec.builds.push_back(b);
  }
  auto corpus = generate_synthetic(spec);
  auto m = build_distributions(corpus.logs, "e");
  for (auto policy : {DifficultyPolicy::RelativeDispersion, DifficultyPolicy::RawVariance}) {
    std::vector<std::pair<double, BuildKey>> scored;
    for (const auto& [k, d] : m) scored.emplace_back(difficulty_score(d, policy), k.build);
    std::sort(scored.begin(), scored.end());
    for (std::size_t i = 0; i < scored.size(); ++i) CHECK(scored[i].second == corpus.manifest.dispersion_order[i]);
  }
}

TEST_CASE("disjoint supports and irreflexivity") {
  auto x = dist({10, 12, 14}, "x"), y = dist({1, 2, 3}, "y");
  CHECK(dominates(x, y, strict()));
  CHECK_FALSE(dominates(y, x, strict()));
  CHECK_FALSE(dominates(x, x, strict()));
  DominancePolicy q;
  q.min_n = 2;
  CHECK(dominates(x, y, q));
  CHECK_FALSE(dominates(x, x, q));
}

TEST_CASE("dominance preconditions") {
  auto x = dist({10, 12, 14}, "x", "e1"), y = dist({1, 2, 3}, "y", "e2");
  CHECK(error_code([&] { dominates(x, y, strict()); }) == ErrorCode::MismatchedContext);
  CHECK(error_code([&] { dominates(x, x, DominancePolicy{}); }) == ErrorCode::InsufficientSamples);
  auto p = strict();
  p.min_n = 1;
  CHECK(error_code([&] { dominates(x, x, p); }) == ErrorCode::OutOfRange);
  p = DominancePolicy{};
  p.low_q = 0.9;
  p.high_q = 0.1;
  CHECK(error_code([&] { validate(p); }) == ErrorCode::BadQuantileRange);
}

TEST_CASE("four build sketch under strict dominance") {
  auto all = scenarios::four_build_encounter();
  const auto& builds = all.at("sketch");
  for (auto trim : {TrimRange{0.0, 1.0}, TrimRange{}}) {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& [kx, x] : builds)
      for (const auto& [ky, y] : builds)
        if (dominates(x, y, strict(trim))) pairs.emplace(kx.profession(), ky.profession());
    CHECK(pairs == std::set<std::pair<std::string, std::string>>{{"d", "b"}});
  }
  // C has the lowest median and is still dominated by nobody
  for (const auto& [k, d] : builds)
    if (k.profession() != "c") CHECK(builds.at(key("c")).median() < d.median());
  auto ranking = viability_ranking(all, strict());
  for (const auto& e : ranking) {
    CHECK(e.dominated_count == (e.key.profession() == "b" ? 1u : 0u));
    CHECK(e.dominates_count == (e.key.profession() == "d" ? 1u : 0u));
  }
  CHECK(ranking.front().key == key("b"));
}

TEST_CASE("strict dominance is transitive and pairs are asymmetric") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0, 1);
  auto random_dist = [&](const std::string& name) {
    std::vector<double> s(5 + gen() % 20);
    double c = 100 * u(gen), w = 1 + 20 * u(gen);
    for (auto& v : s) v = c + w * u(gen);
    return dist(s, name);
  };
  for (int t = 0; t < 2000; ++t) {
    auto a = random_dist("a"), b = random_dist("b"), c = random_dist("c");
    for (auto policy : {strict(), strict(TrimRange{}, 2)}) {
      if (dominates(a, b, policy) && dominates(b, c, policy)) CHECK(dominates(a, c, policy));
      CHECK_FALSE((dominates(a, b, policy) && dominates(b, a, policy)));
    }
    DominancePolicy q;
    q.min_n = 2;
    CHECK_FALSE((dominates(a, b, q) && dominates(b, a, q)));
  }
}

TEST_CASE("single encounter with only D over B") {
  EncounterDistributions all;
  all["e"].emplace(key("b"), dist({1, 2, 3}, "b", "e"));
  all["e"].emplace(key("d"), dist({10, 11, 12}, "d", "e"));
  all["e"].emplace(key("a"), dist({2, 11, 30}, "a", "e"));
  auto r = viability_ranking(all, strict());
  REQUIRE(r.size() == 3);
  CHECK(r[0].key == key("b"));
  CHECK(r[0].dominated_count == 1);
  CHECK(r[0].dominated_by.size() == 1);
  CHECK(r[0].dominated_by[0].dominator == key("d"));
  CHECK(r[1].dominated_count == 0);
  CHECK(r[2].dominated_count == 0);
  CHECK(r[1].key < r[2].key);  // ties in key order
}

TEST_CASE("dominated by two builds on each of three encounters") {
  EncounterDistributions all;
  for (std::string e : {"e1", "e2", "e3"}) {
    all[e].emplace(key("weak"), dist({1, 2, 3}, "weak", e));
    all[e].emplace(key("s1"), dist({10, 11, 12}, "s1", e));
    all[e].emplace(key("s2"), dist({20, 21, 22}, "s2", e));
  }
  auto r = viability_ranking(all, strict());
  CHECK(r[0].key == key("weak"));
  CHECK(r[0].dominated_count == 6);
  CHECK(r[0].dominated_by.size() == 6);
  CHECK(r[1].key == key("s1"));
  CHECK(r[1].dominated_count == 3);
}

TEST_CASE("viability counts equal exhaustive pairwise evaluation") {
  std::mt19937_64 gen(13);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    auto inst = scenarios::random_instance(gen);
    for (auto mode : {DominanceMode::Strict, DominanceMode::Quantile}) {
      DominancePolicy p;
      p.mode = mode;
      bool strict_mode = mode == DominanceMode::Strict;
      auto expected = oracle::viability_counts(inst.samples, strict_mode, strict_mode ? p.trim.lower : p.low_q,
                                               strict_mode ? p.trim.upper : p.high_q, p.min_n);
      bool any_pair = false;
      for (const auto& [enc, builds] : inst.samples) {
        std::size_t q = 0;
        for (const auto& [b, s] : builds) q += s.size() >= p.min_n;
        any_pair |= q >= 2;
      }
      if (!any_pair) {
        CHECK(error_code([&] { viability_ranking(inst.dists, p); }) == ErrorCode::NoQualifyingPairs);
        continue;
      }
      auto ranking = viability_ranking(inst.dists, p);
      std::map<std::string, std::size_t> got;
      for (const auto& e : ranking) {
        got[e.key.profession()] = e.dominated_count;
        CHECK(e.dominated_by.size() == e.dominated_count);
      }
      CHECK(got == expected);
      for (std::size_t i = 1; i < ranking.size(); ++i) {
        CHECK(ranking[i - 1].dominated_count >= ranking[i].dominated_count);
        if (ranking[i - 1].dominated_count == ranking[i].dominated_count) CHECK(ranking[i - 1].key < ranking[i].key);
      }
      ++checked;
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("popularity examples") {
  std::vector<PlayerRecord> ten(10, player("mesmer"));
  std::vector<CombatLog> one{fixtures::make_log("l", "e", "x", 1, ten)};
  auto t = popularity(one);
  CHECK(t.total_slots == 10);
  CHECK(t.share({"mesmer", ""}) == 1.0);

  std::vector<CombatLog> logs;
  for (int i = 0; i < 10; ++i) {
    std::vector<PlayerRecord> p;
    for (int k = 0; k < 10; ++k) p.push_back(player(k < (i < 5 ? 7 : 8) ? "a" : "b"));
    logs.push_back(fixtures::make_log("l" + std::to_string(i), "e", "x", i, p));
  }
  auto s = popularity(logs);
  CHECK(s.share({"a", ""}) == 0.75);
  CHECK(s.share({"b", ""}) == 0.25);
  CHECK(error_code([] { popularity({}, "e9"); }) == ErrorCode::EmptyEra);
}

TEST_CASE("popularity shift examples") {
  PopularityTable a{1000, {{{"engineer", "mechanist"}, 100}, {{"x", ""}, 900}}};
  PopularityTable b{1000, {{{"engineer", "mechanist"}, 171}, {{"x", ""}, 779}, {{"new", ""}, 50}}};
  auto shift = popularity_shift(a, b);
  REQUIRE(shift.size() == 3);
  CHECK(shift[0].key.profession == "engineer");
  CHECK(shift[0].delta_pp == 7.1);
  CHECK(shift[1].key.profession == "new");
  CHECK(shift[1].delta_pp == 5.0);
  CHECK(shift[2].delta_pp == doctest::Approx(-12.1));
  for (const auto& d : popularity_shift(a, a)) CHECK(d.delta_pp == 0.0);
  CHECK(error_code([&] { popularity_shift(PopularityTable{}, a); }) == ErrorCode::EmptyEra);
  try {
    popularity_shift(a, PopularityTable{});
  } catch (const Error& e) {
    CHECK(e.field() == "era_b");
  }
}

TEST_CASE("shares sum to one") {
  std::mt19937_64 gen(14);
  for (int t = 0; t < 50; ++t) {
    std::vector<CombatLog> logs;
    for (int i = 0, n = 1 + static_cast<int>(gen() % 30); i < n; ++i) {
      std::vector<PlayerRecord> p;
      for (std::size_t k = 0, m = 1 + gen() % 10; k < m; ++k) p.push_back(player("p" + std::to_string(gen() % 7)));
      logs.push_back(fixtures::make_log("l" + std::to_string(i), "e", "x", i, p));
    }
    double sum = 0;
    for (const auto& [k, s] : popularity(logs).shares()) sum += s;
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("fairness delta arithmetic") {
  std::vector<CombatLog> logs;
  for (int i = 0; i < 20; ++i) {
    bool with = i < 10;
    bool success = with ? i < 8 : i < 14;
    std::vector<PlayerRecord> p{player("other", 100)};
    if (with) p.push_back(player("target", 100));
    logs.push_back(fixtures::make_log("l" + std::to_string(i), "e", "x", i, p, success));
  }
  auto d = fairness_success_delta(logs, key("target"), {}, 10);
  CHECK(d.n_with == 10);
  CHECK(d.n_without == 10);
  CHECK(d.delta == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(error_code([&] { fairness_success_delta(logs, key("target"), {}, 11); }) == ErrorCode::InsufficientSamples);
  CHECK(error_code([&] { fairness_success_delta(logs, key("other"), {}, 1); }) == ErrorCode::InsufficientSamples);
  logs.back().encounter_id = "y";
  CHECK(error_code([&] { fairness_success_delta(logs, key("target"), {}, 1); }) == ErrorCode::MismatchedContext);
}
