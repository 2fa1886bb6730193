#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "balance/core_model.hpp"
#include "balance/error.hpp"

namespace fixtures {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "balance-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream o(p, std::ios::binary);
  o << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class F>
std::optional<balance::ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const balance::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

template <class F>
std::string error_field(F&& f) {
  try {
    f();
  } catch (const balance::Error& e) {
    return e.field();
  }
  return "<no error>";
}

inline balance::PlayerRecord damage_player(const std::string& profession, std::optional<std::string> spec, double dps,
                                           double condition_share = 0.0) {
  balance::PlayerRecord p;
  p.account_hash = "acct-" + profession;
  p.profession = profession;
  p.specialization = std::move(spec);
  p.dps = dps;
  p.condition_dps = dps * condition_share;
  p.power_dps = dps - p.condition_dps;
  return p;
}

inline balance::CombatLog make_log(std::string id, std::string era, std::string encounter, std::int64_t ts,
                                   std::vector<balance::PlayerRecord> players, bool success = true) {
  balance::CombatLog log;
  log.log_id = std::move(id);
  log.patch_era = std::move(era);
  log.encounter_id = std::move(encounter);
  log.timestamp_utc = ts;
  log.success = success;
  log.duration_s = 120.0;
  log.players = std::move(players);
  return log;
}

inline balance::BuildKey key(const std::string& profession, balance::RoleBucket role = balance::RoleBucket::DirectDamage) {
  return balance::make_build_key(profession, std::nullopt, role);
}

inline balance::PerformanceDistribution dist(std::vector<double> samples, const std::string& build = "x",
                                             const std::string& encounter = "enc", const std::string& era = "era") {
  return balance::PerformanceDistribution(key(build), encounter, era, std::move(samples));
}

}  // namespace fixtures
