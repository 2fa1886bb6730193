#include <doctest.h>

#include "balance/log_codec.hpp"
#include "balance/synthetic.hpp"
#include "fixtures.hpp"

using namespace balance;

namespace {

SyntheticBuild build(const std::string& prof, double location, double dispersion, double weight = 1.0,
                     RoleBucket role = RoleBucket::DirectDamage) {
  SyntheticBuild b{make_build_key(prof, std::nullopt, role)};
  b.location = location;
  b.dispersion = dispersion;
  b.popularity_weight = weight;
  return b;
}

SyntheticSpec base_spec() {
  SyntheticSpec s;
  s.seed = 1234;
  s.eras = {{"e1", 0, 1000}};
  s.encounters = {"a", "b"};
  s.logs_per_era = 100;
  return s;
}

std::string corpus_text(const SyntheticCorpus& c) {
  std::string out;
  for (const auto& log : c.logs) out += serialize_log(log) + "\n";
  return out + to_json(c.manifest).dump();
}

}  // namespace

TEST_CASE("zero dispersion yields the location exactly") {
  auto spec = base_spec();
  spec.builds = {build("solo", 1234.5, 0.0)};
  auto corpus = generate_synthetic(spec);
  for (const auto& log : corpus.logs)
    for (const auto& p : log.players) CHECK(p.dps == 1234.5);
}

TEST_CASE("same seed gives a byte identical corpus") {
  auto spec = base_spec();
  spec.builds = {build("a", 100, 0.3), build("b", 200, 0.1, 2.0, RoleBucket::DamageOverTime)};
  CHECK(corpus_text(generate_synthetic(spec)) == corpus_text(generate_synthetic(spec)));
  auto other = spec;
  other.seed = 1235;
  CHECK(corpus_text(generate_synthetic(other)) != corpus_text(generate_synthetic(spec)));
}

TEST_CASE("weights 3:1 over 10000 slots") {
  auto spec = base_spec();
  spec.builds = {build("a", 100, 0.1, 3.0), build("b", 100, 0.1, 1.0)};
  spec.logs_per_era = 1000;
  auto corpus = generate_synthetic(spec);
  REQUIRE(corpus.manifest.total_slots == 10000);
  std::size_t a = 0;
  for (const auto& log : corpus.logs)
    for (const auto& p : log.players) a += p.profession == "a";
  double share = static_cast<double>(a) / 10000.0;
  CHECK(corpus.manifest.builds[0].popularity_share.at("e1") == doctest::Approx(0.75));
  CHECK(std::abs(share - 0.75) <= 0.02);
}

TEST_CASE("every generated record passes validation and round trips") {
  auto spec = base_spec();
  spec.builds = {build("a", 100, 0.5), build("c", 300, 0.2, 1.0, RoleBucket::DamageOverTime),
                 build("f", 50, 0.2, 1.0, RoleBucket::FullSupport),
                 build("o", 80, 0.2, 1.0, RoleBucket::OffensiveSupport)};
  for (const auto& log : generate_synthetic(spec).logs) {
    CHECK_NOTHROW(validate(log));
    CHECK(parse_log_line(serialize_log(log)) == log);
    CHECK(log.timestamp_utc >= 0);
    CHECK(log.timestamp_utc < 1000);
  }
}

TEST_CASE("manifest records the dispersion order") {
  auto spec = base_spec();
  spec.builds = {build("wide", 100, 0.4), build("narrow", 100, 0.1), build("mid", 100, 0.2)};
  auto m = generate_synthetic(spec).manifest;
  REQUIRE(m.dispersion_order.size() == 3);
  CHECK(m.dispersion_order[0].profession() == "narrow");
  CHECK(m.dispersion_order[2].profession() == "wide");
  CHECK(m.total_logs == 100);
}

TEST_CASE("invalid specs") {
  auto spec = base_spec();
  CHECK(fixtures::error_code([&] { generate_synthetic(spec); }) == ErrorCode::InvalidSpec);
  spec.builds = {build("a", 100, 0.1, 0.0)};
  CHECK(fixtures::error_code([&] { validate(spec); }) == ErrorCode::InvalidSpec);
  spec.builds = {build("a", -1, 0.1)};
  CHECK(fixtures::error_field([&] { validate(spec); }) == "builds[0].location");
  spec.builds = {build("a", 1, 0.1)};
  spec.builds[0].success_bonus = 1.5;
  CHECK(fixtures::error_field([&] { validate(spec); }) == "builds[0].success_bonus");
  spec.builds[0].success_bonus = 0;
  spec.eras.push_back({"e2", 500, 1500});
  CHECK(fixtures::error_code([&] { validate(spec); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("spec json round trip") {
  auto spec = base_spec();
  spec.builds = {build("a", 100, 0.1), build("b", 50, 0.3, 2.0, RoleBucket::FullSupport)};
  spec.builds[1].era_weights["e1"] = 4.0;
  auto back = synthetic_spec_from_json(to_json(spec));
  CHECK(to_json(back) == to_json(spec));
  CHECK(corpus_text(generate_synthetic(back)) == corpus_text(generate_synthetic(spec)));
  CHECK(fixtures::error_code([] { synthetic_spec_from_json(nlohmann::json::parse(R"({"seed":1})")); }) ==
        ErrorCode::InvalidSpec);
}
