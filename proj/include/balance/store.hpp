#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "balance/core_model.hpp"

namespace balance {

enum class StoreMode { ReadOnly, ReadWrite };

// When appended lines reach the disk. Every append is a single write() of a
// complete line to an O_APPEND descriptor, so concurrent readers never see a
// torn record either way; the policy only decides when fsync runs.
enum class Durability { OnSync, EveryAppend };

// Append-only log store partitioned by (era label, encounter id).
//
//   root/eras                     label,start_utc,end_utc per line
//   root/{era}/{encounter}.log    canonical log lines
//   root/index                    era<TAB>encounter<TAB>count, regenerable
//
// The index and the set of known log ids are rebuilt from the partition
// files on open; the index file is rewritten on sync() and close.
// ReadWrite mode holds an exclusive lock on root/.lock (single writer).
class LogStore {
 public:
  using PartitionKey = std::pair<std::string, std::string>;  // (era label, encounter id)

  static LogStore open(const std::filesystem::path& root, StoreMode mode = StoreMode::ReadWrite,
                       Durability durability = Durability::OnSync);

  LogStore(LogStore&&) noexcept;
  LogStore& operator=(LogStore&&) noexcept;
  LogStore(const LogStore&) = delete;
  LogStore& operator=(const LogStore&) = delete;
  ~LogStore();

  const std::filesystem::path& root() const noexcept { return root_; }

  // Registers an era, or accepts an identical re-registration. Throws
  // InvariantViolation for start >= end, a conflicting definition, or an
  // interval overlapping another era.
  void register_era(const EraId& era);
  const std::vector<EraId>& eras() const noexcept { return eras_; }
  std::optional<EraId> find_era(std::string_view label) const;
  // FNV-1a 64 of the canonical registry file content, as 16 hex digits.
  std::string registry_hash() const;

  // True if newly stored, false for a known log_id. Throws EraUnknown or IoError.
  bool append(const CombatLog& log);
  void sync();

  // Every matching log once, ordered by (timestamp_utc, log_id).
  std::vector<CombatLog> scan(std::optional<std::string_view> era = std::nullopt,
                              std::optional<std::string_view> encounter = std::nullopt) const;

  const std::map<PartitionKey, std::size_t>& index() const noexcept { return index_; }
  std::size_t size() const noexcept { return known_ids_.size(); }
  bool contains(const std::string& log_id) const { return known_ids_.count(log_id) != 0; }

 private:
  LogStore() = default;
  void load();
  void write_registry() const;
  void write_index() const;
  std::filesystem::path partition_path(const PartitionKey& key) const;
  int partition_fd(const PartitionKey& key);
  void close_all() noexcept;

  std::filesystem::path root_;
  StoreMode mode_ = StoreMode::ReadOnly;
  Durability durability_ = Durability::OnSync;
  int lock_fd_ = -1;
  std::vector<EraId> eras_;
  std::map<PartitionKey, std::size_t> index_;
  std::set<std::string> known_ids_;
  std::map<PartitionKey, int> open_fds_;
  std::set<PartitionKey> dirty_;
};

std::vector<EraId> read_era_registry(const std::filesystem::path& file);
std::string format_era_registry(const std::vector<EraId>& eras);

}  // namespace balance
