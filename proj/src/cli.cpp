#include "balance/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "balance/error.hpp"
#include "balance/fetch.hpp"
#include "balance/ingest.hpp"
#include "balance/log_codec.hpp"
#include "balance/reconcile.hpp"
#include "balance/report.hpp"
#include "balance/store.hpp"
#include "balance/survey.hpp"
#include "balance/synthetic.hpp"

namespace balance::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr std::string_view kSurveyFormat = "balance-survey/1";
inline constexpr std::string_view kReconcileFormat = "balance-reconcile/1";
inline constexpr std::size_t kMaxListedRejections = 100;

// Flag values that parse but make no sense. Exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, path.string(), "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, path.string(), "read failed");
  return std::move(ss).str();
}

json read_json(const fs::path& path) {
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::MalformedRecord, path.string(), "not valid JSON");
  return j;
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) throw Error(ErrorCode::IoError, path.string(), "cannot open for writing");
  o.write(content.data(), static_cast<std::streamsize>(content.size()));
  o.flush();
  if (!o) throw Error(ErrorCode::IoError, path.string(), "write failed");
}

void emit(const json& j, const std::optional<std::string>& out_path, std::ostream& out) {
  auto text = render_report(j);
  if (out_path) write_file(*out_path, text);
  else out << text;
}

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const char* flag) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw UsageError(std::string(flag) + ": not a number: " + std::string(s));
  return v;
}

TrimRange parse_trim(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--trim: expected LO,HI");
  return {parse_double(std::string_view(text).substr(0, comma), "--trim"),
          parse_double(std::string_view(text).substr(comma + 1), "--trim")};
}

std::size_t count_flag(double v, const char* flag) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw UsageError(std::string(flag) + ": expected a whole number");
  return static_cast<std::size_t>(v);
}

void register_eras_file(LogStore& store, const std::optional<std::string>& eras_file) {
  if (!eras_file) return;
  for (const auto& era : read_era_registry(*eras_file)) store.register_era(era);
}

json rejection_json(const Rejection& r) {
  return {{"source", r.path}, {"line", r.line}, {"reason", to_string(r.reason)}, {"detail", r.detail}};
}

json ingest_json(const IngestReport& r) {
  json reasons = json::object();
  for (const auto& [code, n] : r.rejection_reasons) reasons[std::string(to_string(code))] = n;
  json listed = json::array();
  for (std::size_t i = 0; i < r.rejections.size() && i < kMaxListedRejections; ++i)
    listed.push_back(rejection_json(r.rejections[i]));
  const std::size_t listed_count = listed.size();
  json io = json::array();
  for (const auto& [path, msg] : r.io_errors) io.push_back({{"path", path}, {"error", msg}});
  return {{"accepted", r.accepted},
          {"rejected", r.rejected},
          {"duplicate", r.duplicate},
          {"rejection_reasons", std::move(reasons)},
          {"rejections", std::move(listed)},
          {"rejections_listed", listed_count},
          {"io_errors", std::move(io)}};
}

// ---- ingest ----

struct IngestArgs {
  std::string store;
  std::optional<std::string> eras;
  std::vector<std::string> files;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  auto store = LogStore::open(a.store, StoreMode::ReadWrite);
  register_eras_file(store, a.eras);
  std::vector<fs::path> paths(a.files.begin(), a.files.end());
  auto report = ingest_files(paths, store);
  store.sync();
  auto j = ingest_json(report);
  j["store_size"] = store.size();
  emit(j, std::nullopt, out);
  for (const auto& [path, msg] : report.io_errors) err << msg << "\n";
  return report.io_errors.empty() ? kExitOk : kExitData;
}

// ---- fetch ----

struct FetchArgs {
  std::string store;
  std::string endpoint;
  std::optional<std::string> era;
  std::optional<std::string> eras;
  double page_size = 100;
};

int cmd_fetch(const FetchArgs& a, std::ostream& out, std::ostream&) {
  FetchOptions options;
  options.era_filter = a.era;
  options.page_size = count_flag(a.page_size, "--page-size");
  if (const char* token = std::getenv("BALANCE_FETCH_TOKEN"); token && *token) options.bearer_token = token;

  auto store = LogStore::open(a.store, StoreMode::ReadWrite);
  register_eras_file(store, a.eras);
  IngestReport stored;
  auto summary = fetch_paginated(a.endpoint, options, [&](CombatLog&& log) {
    try {
      if (store.append(log)) ++stored.accepted;
      else ++stored.duplicate;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      ++stored.rejected;
      ++stored.rejection_reasons[e.code()];
      stored.rejections.push_back({a.endpoint, 0, e.code(), e.what()});
    }
  });
  store.sync();

  json skipped = json::array();
  for (std::size_t i = 0; i < summary.skipped.size() && i < kMaxListedRejections; ++i)
    skipped.push_back(rejection_json(summary.skipped[i]));
  auto j = ingest_json(stored);
  j["pages"] = summary.pages;
  j["requests"] = summary.requests;
  j["yielded"] = summary.yielded;
  j["filtered"] = summary.filtered;
  j["skipped"] = summary.skipped.size();
  j["skipped_items"] = std::move(skipped);
  j["store_size"] = store.size();
  emit(j, std::nullopt, out);
  return kExitOk;
}

// ---- synth ----

struct SynthArgs {
  std::string spec;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  auto spec = synthetic_spec_from_json(read_json(a.spec));
  auto corpus = generate_synthetic(spec);

  fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, dir.string(), ec.message());

  std::string lines;
  for (const auto& log : corpus.logs) {
    lines += serialize_log(log);
    lines += '\n';
  }
  write_file(dir / "corpus.log", lines);
  write_file(dir / "manifest.json", render_report(to_json(corpus.manifest)));
  auto eras = spec.eras;
  std::sort(eras.begin(), eras.end(), [](const EraId& x, const EraId& y) { return x.start_utc < y.start_utc; });
  write_file(dir / "eras", format_era_registry(eras));

  auto store = LogStore::open(dir / "store", StoreMode::ReadWrite);
  for (const auto& era : eras) store.register_era(era);
  IngestReport report;
  ingest_buffer(lines, (dir / "corpus.log").string(), store, report);
  store.sync();

  json j = ingest_json(report);
  j["logs"] = corpus.manifest.total_logs;
  j["player_slots"] = corpus.manifest.total_slots;
  j["store"] = (dir / "store").string();
  j["era_registry_hash"] = store.registry_hash();
  emit(j, std::nullopt, out);
  return kExitOk;
}

// ---- popularity ----

struct PopularityArgs {
  std::string store;
  std::string era;
  std::optional<std::string> vs;
  std::optional<std::string> out;
};

EraId require_era(const LogStore& store, const std::string& label) {
  auto era = store.find_era(label);
  if (!era) throw Error(ErrorCode::EraUnknown, label, "era is not registered in the store");
  return *era;
}

json shift_json(const std::vector<PopularityShift>& shifts) {
  json rows = json::array();
  for (const auto& s : shifts)
    rows.push_back({{"profession", s.key.profession}, {"specialization", s.key.specialization}, {"delta_pp", s.delta_pp}});
  return rows;
}

int cmd_popularity(const PopularityArgs& a, std::ostream& out, std::ostream&) {
  auto store = LogStore::open(a.store, StoreMode::ReadOnly);
  require_era(store, a.era);
  auto logs = store.scan(a.era);
  auto table = popularity(logs, a.era);
  json j = {{"era", a.era}, {"popularity", to_json(table)}, {"era_registry_hash", store.registry_hash()}};
  if (a.vs) {
    require_era(store, *a.vs);
    auto ref_logs = store.scan(*a.vs);
    auto ref = popularity(ref_logs, *a.vs);
    j["reference_era"] = *a.vs;
    j["reference_popularity"] = to_json(ref);
    j["shift"] = shift_json(popularity_shift(ref, table));
  }
  emit(j, a.out, out);
  return kExitOk;
}

// ---- metrics ----

struct MetricsArgs {
  std::string store;
  std::string era;
  std::optional<std::string> vs;
  std::optional<std::string> out;
  std::optional<std::string> config;
  std::optional<std::string> dominance;
  std::optional<std::string> difficulty;
  std::optional<std::string> trim;
  std::optional<double> min_n;
  bool exclude_support = false;
  std::optional<double> low_q, high_q;
  std::optional<double> heal_ratio_min, boon_ratio_min, condition_share_min;
  std::optional<double> cloud_cap;
  std::optional<double> cloud_seed;
};

MetricsConfig resolve_config(const MetricsArgs& a) {
  MetricsConfig c;
  if (a.config) c = metrics_config_from_json(read_json(*a.config), c);
  if (a.dominance) c.dominance.mode = *a.dominance == "strict" ? DominanceMode::Strict : DominanceMode::Quantile;
  if (a.difficulty)
    c.difficulty = *a.difficulty == "variance" ? DifficultyPolicy::RawVariance : DifficultyPolicy::RelativeDispersion;
  if (a.trim) c.dominance.trim = parse_trim(*a.trim);
  if (a.min_n) c.dominance.min_n = count_flag(*a.min_n, "--min-n");
  if (a.exclude_support) c.exclude_support = true;
  if (a.low_q) c.dominance.low_q = *a.low_q;
  if (a.high_q) c.dominance.high_q = *a.high_q;
  if (a.heal_ratio_min) c.thresholds.heal_ratio_min = *a.heal_ratio_min;
  if (a.boon_ratio_min) c.thresholds.boon_ratio_min = *a.boon_ratio_min;
  if (a.condition_share_min) c.thresholds.condition_share_min = *a.condition_share_min;
  if (a.cloud_cap) c.cloud_cap = count_flag(*a.cloud_cap, "--cloud-cap");
  if (a.cloud_seed) c.cloud_seed = count_flag(*a.cloud_seed, "--cloud-seed");
  return c;
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out, std::ostream&) {
  auto config = resolve_config(a);
  auto store = LogStore::open(a.store, StoreMode::ReadOnly);
  auto era = require_era(store, a.era);
  auto logs = store.scan(a.era);
  std::optional<EraId> ref_era;
  std::vector<CombatLog> ref_logs;
  if (a.vs) {
    ref_era = require_era(store, *a.vs);
    ref_logs = store.scan(*a.vs);
  }
  std::optional<std::pair<EraId, std::span<const CombatLog>>> reference;
  if (ref_era) reference.emplace(*ref_era, std::span<const CombatLog>(ref_logs));
  auto report = build_balance_report(logs, era, config, store.registry_hash(), reference);
  emit(to_json(report), a.out, out);
  return kExitOk;
}

// ---- survey ----

struct SurveyArgs {
  std::string data;
  std::string scales;
  std::optional<double> population;
  double confidence = 0.95;
  double margin = 0.05;
  std::optional<std::string> out;
};

double round1(double v) { return std::round(v * 10.0) / 10.0; }

json vote_rows(const std::vector<VoteShare>& shares) {
  json rows = json::array();
  for (const auto& s : shares) rows.push_back({{"build", s.build}, {"count", s.count}, {"share", s.share}});
  return rows;
}

int cmd_survey(const SurveyArgs& a, std::ostream& out, std::ostream&) {
  auto dataset = load_survey(a.data, a.scales);
  std::optional<std::size_t> population;
  if (a.population) population = count_flag(*a.population, "--population");
  auto n_min = cochran_min_sample(a.confidence, a.margin, 0.5, population);

  json likert = json::array();
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    auto column = dataset.column(i);
    json row = {{"item", dataset.items[i].id}, {"scale", dataset.items[i].scale}};
    try {
      auto s = likert_summary(column);
      row["n"] = s.n;
      row["mean"] = round1(s.mean);
      row["sd"] = round1(s.sd);
      row["mean_raw"] = s.mean;
      row["sd_raw"] = s.sd;
    } catch (const Error& e) {
      row["error"] = e.what();
    }
    likert.push_back(std::move(row));
  }

  json validity;
  try {
    auto dv = discriminant_validity(dataset);
    json per_item = json::array();
    for (const auto& [item, r] : dv.per_item) per_item.push_back({{"item", item}, {"r_d", r}});
    validity = {{"per_item", std::move(per_item)}, {"overall", dv.overall}};
  } catch (const Error& e) {
    validity = {{"error", e.what()}};
  }

  json kappa;
  try {
    kappa = {{"kappa", fleiss_kappa(dataset.coder_labels)},
             {"units", dataset.coder_labels.size()},
             {"raters", dataset.raters}};
  } catch (const Error& e) {
    kappa = {{"error", e.what()}};
  }

  auto tally = tally_votes(dataset);
  json j = {
      {"format", kSurveyFormat},
      {"engine_version", kEngineVersion},
      {"participants", dataset.participants()},
      {"cochran",
       {{"confidence", a.confidence},
        {"margin", a.margin},
        {"p", 0.5},
        {"population", population ? json(*population) : json(nullptr)},
        {"min_sample", n_min},
        {"meets_minimum", dataset.participants() >= n_min}}},
      {"likert", std::move(likert)},
      {"discriminant_validity", std::move(validity)},
      {"fleiss_kappa", std::move(kappa)},
      {"votes", {{"participants", tally.participants}, {"nerf", vote_rows(tally.nerf)}, {"buff", vote_rows(tally.buff)}}},
  };
  emit(j, a.out, out);
  return kExitOk;
}

// ---- reconcile ----

struct ReconcileArgs {
  std::string report;
  std::string survey;
  double vote_floor = 0.05;
  std::optional<double> threshold;
  std::optional<std::string> out;
};

std::map<std::string, double> shares_from(const json& rows) {
  std::map<std::string, double> out;
  for (const auto& r : rows) out[r.at("build").get<std::string>()] = r.at("share").get<double>();
  return out;
}

int cmd_reconcile(const ReconcileArgs& a, std::ostream& out, std::ostream& err) {
  auto report = report_from_json(read_json(a.report));
  auto survey = read_json(a.survey);
  std::map<std::string, double> nerf, buff;
  try {
    if (survey.at("format").get<std::string>() != kSurveyFormat)
      throw Error(ErrorCode::SchemaViolation, "format", "expected " + std::string(kSurveyFormat));
    nerf = shares_from(survey.at("votes").at("nerf"));
    buff = shares_from(survey.at("votes").at("buff"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, a.survey, e.what());
  }

  int failures = 0;
  json alignment, consistency;
  try {
    alignment = to_json(vote_alignment(nerf, buff, report, a.vote_floor));
  } catch (const Error& e) {
    alignment = {{"error", e.what()}};
    err << e.what() << "\n";
    ++failures;
  }
  try {
    consistency = to_json(difficulty_reward_consistency(report, a.threshold));
  } catch (const Error& e) {
    consistency = {{"error", e.what()}};
    err << e.what() << "\n";
    ++failures;
  }
  json j = {{"format", kReconcileFormat},
            {"engine_version", kEngineVersion},
            {"era", report.era.label},
            {"era_registry_hash", report.registry_hash},
            {"vote_alignment", std::move(alignment)},
            {"difficulty_reward", std::move(consistency)}};
  emit(j, a.out, out);
  return failures == 2 ? kExitData : kExitOk;
}

// ---- export-plot ----

struct ExportArgs {
  std::string report;
  std::string kind;
  std::string out;
  bool include_support = false;
};

std::string distributions_csv(const BalanceReport& r, bool include_support) {
  std::vector<const DistributionSummary*> rows;
  for (const auto& d : r.distributions) {
    if (!include_support && is_support(d.key.role())) continue;
    rows.push_back(&d);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const DistributionSummary* x, const DistributionSummary* y) {
    if (x->encounter_id != y->encounter_id) return x->encounter_id < y->encounter_id;
    if (x->median != y->median) return x->median < y->median;
    return x->key < y->key;
  });
  std::string csv = "encounter,build,position,n,min,q1,median,q3,max,dps\n";
  std::string current;
  std::size_t position = 0;
  for (const auto* d : rows) {
    if (d->encounter_id != current) {
      current = d->encounter_id;
      position = 0;
    }
    ++position;
    std::string prefix = d->encounter_id + "," + d->key.to_string() + "," + std::to_string(position) + "," +
                         std::to_string(d->n) + "," + number(d->min) + "," + number(d->q1) + "," +
                         number(d->median) + "," + number(d->q3) + "," + number(d->max) + ",";
    if (d->cloud.empty()) csv += prefix + "\n";
    for (double v : d->cloud) csv += prefix + number(v) + "\n";
  }
  return csv;
}

std::string popularity_csv(const BalanceReport& r) {
  std::vector<std::pair<const EraId*, const PopularityTable*>> eras;
  if (r.reference_era && r.reference_popularity) eras.emplace_back(&*r.reference_era, &*r.reference_popularity);
  eras.emplace_back(&r.era, &r.popularity);
  std::stable_sort(eras.begin(), eras.end(),
                   [](const auto& x, const auto& y) { return x.first->start_utc < y.first->start_utc; });
  std::string csv = "era,era_start_utc,profession,specialization,count,share\n";
  for (const auto& [era, table] : eras) {
    for (const auto& [key, count] : table->counts) {
      csv += era->label + "," + std::to_string(era->start_utc) + "," + key.profession + "," + key.specialization +
             "," + std::to_string(count) + "," + number(table->share(key)) + "\n";
    }
  }
  return csv;
}

int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream&) {
  auto report = report_from_json(read_json(a.report));
  std::string csv = a.kind == "distributions" ? distributions_csv(report, a.include_support) : popularity_csv(report);
  write_file(a.out, csv);
  out << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build balance analytics over combat logs and player surveys", "balance"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Append line-delimited logs to a store");
  ingest_cmd->add_option("--store", ingest.store, "Store directory")->required();
  ingest_cmd->add_option("--eras", ingest.eras, "Era registry file to register first");
  ingest_cmd->add_option("files", ingest.files, "Log files")->required();

  FetchArgs fetch;
  auto* fetch_cmd = app.add_subcommand("fetch", "Pull logs from a paginated HTTP endpoint into a store");
  fetch_cmd->add_option("--store", fetch.store, "Store directory")->required();
  fetch_cmd->add_option("--endpoint", fetch.endpoint, "http:// URL")->required();
  fetch_cmd->add_option("--era", fetch.era, "Keep only this era");
  fetch_cmd->add_option("--eras", fetch.eras, "Era registry file to register first");
  fetch_cmd->add_option("--page-size", fetch.page_size, "Items per page");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus, manifest and store");
  synth_cmd->add_option("--spec", synth.spec, "Generator spec (JSON)")->required();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  PopularityArgs pop;
  auto* pop_cmd = app.add_subcommand("popularity", "Build shares per era and their shift");
  pop_cmd->add_option("--store", pop.store, "Store directory")->required();
  pop_cmd->add_option("--era", pop.era, "Era label")->required();
  pop_cmd->add_option("--vs", pop.vs, "Reference era; shifts are era minus reference");
  pop_cmd->add_option("--out", pop.out, "Write here instead of stdout");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute the balance report for one era");
  metrics_cmd->add_option("--store", metrics.store, "Store directory")->required();
  metrics_cmd->add_option("--era", metrics.era, "Era label")->required();
  metrics_cmd->add_option("--vs", metrics.vs, "Reference era for popularity shift");
  metrics_cmd->add_option("--out", metrics.out, "Write the report here instead of stdout");
  metrics_cmd->add_option("--config", metrics.config, "JSON configuration; flags override it");
  metrics_cmd->add_option("--dominance", metrics.dominance)->check(CLI::IsMember({"strict", "quantile"}));
  metrics_cmd->add_option("--difficulty", metrics.difficulty)->check(CLI::IsMember({"cv", "variance"}));
  metrics_cmd->add_option("--trim", metrics.trim, "LO,HI quantiles kept before dispersion and strict bounds");
  metrics_cmd->add_option("--min-n", metrics.min_n, "Minimum samples per distribution");
  metrics_cmd->add_flag("--exclude-support", metrics.exclude_support, "Drop support roles from damage metrics");
  metrics_cmd->add_option("--low-q", metrics.low_q, "Quantile dominance floor");
  metrics_cmd->add_option("--high-q", metrics.high_q, "Quantile dominance ceiling");
  metrics_cmd->add_option("--heal-ratio-min", metrics.heal_ratio_min);
  metrics_cmd->add_option("--boon-ratio-min", metrics.boon_ratio_min);
  metrics_cmd->add_option("--condition-share-min", metrics.condition_share_min);
  metrics_cmd->add_option("--cloud-cap", metrics.cloud_cap, "Samples kept per distribution for plots");
  metrics_cmd->add_option("--cloud-seed", metrics.cloud_seed);

  SurveyArgs survey;
  auto* survey_cmd = app.add_subcommand("survey", "Survey statistics report");
  survey_cmd->add_option("--data", survey.data, "Survey CSV")->required();
  survey_cmd->add_option("--scales", survey.scales, "Scale definition (JSON)")->required();
  survey_cmd->add_option("--population", survey.population, "Population size for the finite correction");
  survey_cmd->add_option("--confidence", survey.confidence);
  survey_cmd->add_option("--margin", survey.margin);
  survey_cmd->add_option("--out", survey.out, "Write here instead of stdout");

  ReconcileArgs rec;
  auto* rec_cmd = app.add_subcommand("reconcile", "Compare survey votes with a balance report");
  rec_cmd->add_option("--report", rec.report, "Balance report")->required();
  rec_cmd->add_option("--survey", rec.survey, "Survey report")->required();
  rec_cmd->add_option("--vote-floor", rec.vote_floor);
  rec_cmd->add_option("--threshold", rec.threshold, "Rank residual flag threshold (default K/4)");
  rec_cmd->add_option("--out", rec.out, "Write here instead of stdout");

  ExportArgs exp;
  auto* exp_cmd = app.add_subcommand("export-plot", "Write plot data as CSV");
  exp_cmd->add_option("--report", exp.report, "Balance report")->required();
  exp_cmd->add_option("--kind", exp.kind)->required()->check(CLI::IsMember({"distributions", "popularity"}));
  exp_cmd->add_option("--out", exp.out, "CSV path")->required();
  exp_cmd->add_flag("--include-support", exp.include_support, "Keep support builds in distribution clouds");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest, out, err);
    if (*fetch_cmd) return cmd_fetch(fetch, out, err);
    if (*synth_cmd) return cmd_synth(synth, out, err);
    if (*pop_cmd) return cmd_popularity(pop, out, err);
    if (*metrics_cmd) return cmd_metrics(metrics, out, err);
    if (*survey_cmd) return cmd_survey(survey, out, err);
    if (*rec_cmd) return cmd_reconcile(rec, out, err);
    if (*exp_cmd) return cmd_export(exp, out, err);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace balance::cli
