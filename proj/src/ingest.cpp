#include "balance/ingest.hpp"

#include <fstream>
#include <sstream>

#include "balance/log_codec.hpp"

namespace balance {

namespace {

void reject(IngestReport& report, const std::string& source, std::size_t line, const Error& e) {
  ++report.rejected;
  ++report.rejection_reasons[e.code()];
  report.rejections.push_back({source, line, e.code(), e.what()});
}

}  // namespace

void ingest_buffer(std::string_view content, const std::string& source, LogStore& store,
                   IngestReport& report) {
  std::size_t line_no = 0;
  while (!content.empty()) {
    auto nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content.remove_prefix(nl == std::string_view::npos ? content.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    CombatLog log;
    try {
      log = parse_log_line(line);
    } catch (const Error& e) {
      reject(report, source, line_no, e);
      continue;
    }
    try {
      if (store.append(log)) ++report.accepted;
      else ++report.duplicate;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      reject(report, source, line_no, e);
    }
  }
}

IngestReport ingest_files(const std::vector<std::filesystem::path>& paths, LogStore& store) {
  IngestReport report;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      report.io_errors.emplace_back(path.string(), "cannot open for reading");
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
      report.io_errors.emplace_back(path.string(), "read failed");
      continue;
    }
    try {
      ingest_buffer(buf.view(), path.string(), store, report);
      store.sync();
    } catch (const Error& e) {
      report.io_errors.emplace_back(path.string(), e.what());
    }
  }
  return report;
}

}  // namespace balance
