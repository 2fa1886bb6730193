#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "balance/core_model.hpp"
#include "balance/error.hpp"
#include "balance/survey.hpp"

namespace balance {

namespace {

using Row = std::vector<std::string>;

std::vector<Row> parse_csv(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string cell;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(cell));
        cell.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !cell.empty()) {
          row.push_back(std::move(cell));
          rows.push_back(std::move(row));
        }
        row.clear();
        cell.clear();
        row_has_content = false;
        break;
      default:
        cell.push_back(ch);
        row_has_content = true;
    }
  }
  if (quoted) throw Error(ErrorCode::InvalidSurvey, "", "unterminated quoted cell");
  if (row_has_content || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA"; }

std::set<std::string> split_votes(const std::string& cell) {
  std::set<std::string> out;
  if (is_missing(cell)) return out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    auto end = cell.find(';', start);
    if (end == std::string::npos) end = cell.size();
    auto name = normalize_identifier(std::string_view(cell).substr(start, end - start));
    if (!name.empty()) out.insert(std::move(name));
    start = end + 1;
  }
  return out;
}

}  // namespace

SurveyDataset parse_survey(std::string_view table, const nlohmann::json& scales) {
  if (!scales.is_object() || scales.empty())
    throw Error(ErrorCode::InvalidSurvey, "scales", "expected a non-empty object of scale -> item ids");
  std::map<std::string, std::string> item_scale;
  SurveyDataset d;
  for (const auto& [scale, items] : scales.items()) {
    d.scales.push_back(scale);
    if (!items.is_array()) throw Error(ErrorCode::InvalidSurvey, "scales." + scale, "expected array of item ids");
    for (const auto& item : items) {
      if (!item.is_string()) throw Error(ErrorCode::InvalidSurvey, "scales." + scale, "item ids must be strings");
      if (!item_scale.emplace(item.get<std::string>(), scale).second)
        throw Error(ErrorCode::InvalidSurvey, item.get<std::string>(), "item listed in more than one scale");
    }
  }

  auto rows = parse_csv(table);
  if (rows.empty()) throw Error(ErrorCode::InvalidSurvey, "header", "missing header line");
  const Row header = [&] {
    Row h;
    for (const auto& c : rows.front()) h.push_back(trim(c));
    return h;
  }();

  enum class Kind { Ignore, Item, Nerf, Buff, Coder };
  std::vector<std::pair<Kind, std::size_t>> columns;  // kind, index into items/raters
  for (const auto& name : header) {
    if (name == "participant") {
      columns.emplace_back(Kind::Ignore, 0);
    } else if (name == "nerf") {
      columns.emplace_back(Kind::Nerf, 0);
    } else if (name == "buff") {
      columns.emplace_back(Kind::Buff, 0);
    } else if (name.rfind("coder:", 0) == 0) {
      columns.emplace_back(Kind::Coder, d.raters.size());
      d.raters.push_back(name.substr(6));
    } else {
      auto it = item_scale.find(name);
      if (it == item_scale.end()) throw Error(ErrorCode::InvalidSurvey, name, "column is not an item of any scale");
      columns.emplace_back(Kind::Item, d.items.size());
      d.items.push_back({name, it->second});
    }
  }
  for (const auto& [item, scale] : item_scale) {
    if (std::none_of(d.items.begin(), d.items.end(), [&](const SurveyItem& i) { return i.id == item; }))
      throw Error(ErrorCode::InvalidSurvey, item, "item listed in scales but absent from data");
  }

  std::map<std::string, int> categories;
  std::vector<std::vector<std::optional<std::string>>> raw_labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row& row = rows[r];
    std::string where = "row " + std::to_string(r + 1);
    if (row.size() != header.size())
      throw Error(ErrorCode::InvalidSurvey, where, "expected " + std::to_string(header.size()) + " cells");
    std::vector<Response> responses(d.items.size());
    std::set<std::string> nerf, buff;
    std::vector<std::optional<std::string>> labels(d.raters.size());
    bool any_label = false;
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::string cell = trim(row[c]);
      auto [kind, index] = columns[c];
      switch (kind) {
        case Kind::Ignore: break;
        case Kind::Nerf: nerf = split_votes(cell); break;
        case Kind::Buff: buff = split_votes(cell); break;
        case Kind::Coder:
          if (!is_missing(cell)) {
            labels[index] = cell;
            categories.emplace(cell, 0);
            any_label = true;
          }
          break;
        case Kind::Item: {
          if (is_missing(cell)) break;
          int value = 0;
          auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
          if (ec != std::errc() || ptr != cell.data() + cell.size() || value < 1 || value > 7)
            throw Error(ErrorCode::InvalidSurvey, where + "." + header[c], "expected 1..7 or NA, got '" + cell + "'");
          responses[index] = value;
          break;
        }
      }
    }
    d.responses.push_back(std::move(responses));
    d.nerf_votes.push_back(std::move(nerf));
    d.buff_votes.push_back(std::move(buff));
    if (any_label) raw_labels.push_back(std::move(labels));
  }

  int next_id = 0;
  for (auto& [label, id] : categories) id = next_id++;
  for (const auto& labels : raw_labels) {
    std::vector<std::optional<int>> unit;
    for (const auto& l : labels) unit.push_back(l ? std::optional<int>(categories.at(*l)) : std::nullopt);
    d.coder_labels.push_back(std::move(unit));
  }
  validate(d);
  return d;
}

SurveyDataset load_survey(const std::filesystem::path& data, const std::filesystem::path& scales) {
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, p.string(), "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
  };
  auto scales_json = nlohmann::json::parse(slurp(scales), nullptr, false);
  if (scales_json.is_discarded()) throw Error(ErrorCode::InvalidSurvey, scales.string(), "not valid JSON");
  return parse_survey(slurp(data), scales_json);
}

}  // namespace balance
