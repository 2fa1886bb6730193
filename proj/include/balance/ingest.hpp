#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "balance/error.hpp"
#include "balance/store.hpp"

namespace balance {

struct Rejection {
  std::string path;
  std::size_t line = 0;
  ErrorCode reason = ErrorCode::MalformedRecord;
  std::string detail;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t duplicate = 0;
  std::map<ErrorCode, std::size_t> rejection_reasons;
  std::vector<Rejection> rejections;
  // Paths that could not be read; ingestion continues past them.
  std::vector<std::pair<std::string, std::string>> io_errors;

  std::size_t total() const noexcept { return accepted + rejected + duplicate; }
};

// Ingests line-delimited logs into `store`, first occurrence of a log_id
// wins. Blank lines are skipped and not counted. Each file is synced to
// disk once it has been processed.
IngestReport ingest_files(const std::vector<std::filesystem::path>& paths, LogStore& store);

// Same, for an in-memory buffer (one log per line). `source` labels rejections.
void ingest_buffer(std::string_view content, const std::string& source, LogStore& store,
                   IngestReport& report);

}  // namespace balance
