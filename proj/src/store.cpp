#include "balance/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "balance/error.hpp"
#include "balance/hash.hpp"
#include "balance/log_codec.hpp"

namespace fs = std::filesystem;

namespace balance {

namespace {

std::string errno_text() { return std::strerror(errno); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, path.string(), "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file_atomically(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, tmp.string(), "cannot open for writing");
    out << content;
    if (!out.flush()) throw Error(ErrorCode::IoError, tmp.string(), "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, path.string(), ec.message());
}

template <typename Fn>
void for_each_complete_line(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  while (!content.empty()) {
    auto nl = content.find('\n');
    if (nl == std::string_view::npos) break;  // unterminated tail: a write in progress
    ++line_no;
    std::string_view line = content.substr(0, nl);
    content.remove_prefix(nl + 1);
    if (!line.empty()) fn(line, line_no);
  }
}

bool parse_i64(std::string_view text, std::int64_t& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::vector<EraId> read_era_registry(const fs::path& file) {
  std::vector<EraId> eras;
  std::string content = read_file(file);
  content.push_back('\n');
  for_each_complete_line(content, [&](std::string_view line, std::size_t line_no) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) return;
    auto where = file.string() + ":" + std::to_string(line_no);
    auto c1 = line.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos)
      throw Error(ErrorCode::InvariantViolation, where, "expected label,start_utc,end_utc");
    EraId era;
    era.label = std::string(line.substr(0, c1));
    if (!parse_i64(line.substr(c1 + 1, c2 - c1 - 1), era.start_utc) ||
        !parse_i64(line.substr(c2 + 1), era.end_utc))
      throw Error(ErrorCode::InvariantViolation, where, "bad integer");
    eras.push_back(std::move(era));
  });
  return eras;
}

std::string format_era_registry(const std::vector<EraId>& eras) {
  std::string out;
  for (const auto& e : eras) {
    out += e.label + "," + std::to_string(e.start_utc) + "," + std::to_string(e.end_utc) + "\n";
  }
  return out;
}

LogStore LogStore::open(const fs::path& root, StoreMode mode, Durability durability) {
  LogStore store;
  store.root_ = root;
  store.mode_ = mode;
  store.durability_ = durability;
  std::error_code ec;
  if (mode == StoreMode::ReadWrite) {
    fs::create_directories(root, ec);
    if (ec) throw Error(ErrorCode::IoError, root.string(), ec.message());
    fs::path lock = root / ".lock";
    store.lock_fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (store.lock_fd_ < 0) throw Error(ErrorCode::IoError, lock.string(), errno_text());
    if (::flock(store.lock_fd_, LOCK_EX | LOCK_NB) != 0)
      throw Error(ErrorCode::IoError, root.string(), "store is locked by another writer");
  } else if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::IoError, root.string(), "store directory does not exist");
  }
  store.load();
  if (mode == StoreMode::ReadWrite) store.write_index();
  return store;
}

LogStore::LogStore(LogStore&& other) noexcept { *this = std::move(other); }

LogStore& LogStore::operator=(LogStore&& other) noexcept {
  if (this != &other) {
    close_all();
    root_ = std::move(other.root_);
    mode_ = other.mode_;
    durability_ = other.durability_;
    lock_fd_ = std::exchange(other.lock_fd_, -1);
    eras_ = std::move(other.eras_);
    index_ = std::move(other.index_);
    known_ids_ = std::move(other.known_ids_);
    open_fds_ = std::move(other.open_fds_);
    other.open_fds_.clear();
    dirty_ = std::move(other.dirty_);
    other.dirty_.clear();
  }
  return *this;
}

LogStore::~LogStore() { close_all(); }

void LogStore::close_all() noexcept {
  if (mode_ == StoreMode::ReadWrite && lock_fd_ >= 0) {
    try {
      sync();
    } catch (...) {
      // Index is regenerable; partition data was already written.
    }
  }
  for (auto& [key, fd] : open_fds_) ::close(fd);
  open_fds_.clear();
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
    lock_fd_ = -1;
  }
}

void LogStore::load() {
  fs::path registry = root_ / "eras";
  if (fs::exists(registry)) {
    eras_ = read_era_registry(registry);
    std::sort(eras_.begin(), eras_.end(),
              [](const EraId& a, const EraId& b) { return a.start_utc < b.start_utc; });
  }
  index_.clear();
  known_ids_.clear();
  for (const auto& era : eras_) {
    fs::path dir = root_ / era.label;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) continue;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".log") continue;
      PartitionKey key{era.label, entry.path().stem().string()};
      std::size_t& count = index_[key];
      std::string content = read_file(entry.path());
      for_each_complete_line(content, [&](std::string_view line, std::size_t line_no) {
        CombatLog log;
        try {
          log = parse_log_line(line);
        } catch (const Error& e) {
          throw Error(ErrorCode::IoError, entry.path().string() + ":" + std::to_string(line_no),
                      std::string("corrupt partition: ") + e.what());
        }
        known_ids_.insert(std::move(log.log_id));
        ++count;
      });
    }
  }
}

void LogStore::write_registry() const { write_file_atomically(root_ / "eras", format_era_registry(eras_)); }

void LogStore::write_index() const {
  std::string out;
  for (const auto& [key, count] : index_) {
    out += key.first + "\t" + key.second + "\t" + std::to_string(count) + "\n";
  }
  write_file_atomically(root_ / "index", out);
}

void LogStore::register_era(const EraId& era) {
  if (mode_ != StoreMode::ReadWrite) throw Error(ErrorCode::IoError, root_.string(), "store opened read-only");
  if (!is_safe_identifier(era.label))
    throw Error(ErrorCode::InvariantViolation, "eras." + era.label, "label must match [A-Za-z0-9_.-]+");
  if (era.start_utc >= era.end_utc)
    throw Error(ErrorCode::InvariantViolation, "eras." + era.label, "start_utc must be < end_utc");
  for (const auto& existing : eras_) {
    if (existing.label == era.label) {
      if (existing == era) return;
      throw Error(ErrorCode::InvariantViolation, "eras." + era.label, "conflicting definition");
    }
    if (existing.overlaps(era))
      throw Error(ErrorCode::InvariantViolation, "eras." + era.label, "overlaps era " + existing.label);
  }
  eras_.push_back(era);
  std::sort(eras_.begin(), eras_.end(),
            [](const EraId& a, const EraId& b) { return a.start_utc < b.start_utc; });
  write_registry();
}

std::optional<EraId> LogStore::find_era(std::string_view label) const {
  for (const auto& e : eras_) {
    if (e.label == label) return e;
  }
  return std::nullopt;
}

std::string LogStore::registry_hash() const { return to_hex(fnv1a64(format_era_registry(eras_))); }

fs::path LogStore::partition_path(const PartitionKey& key) const {
  return root_ / key.first / (key.second + ".log");
}

int LogStore::partition_fd(const PartitionKey& key) {
  auto it = open_fds_.find(key);
  if (it != open_fds_.end()) return it->second;
  fs::path path = partition_path(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, path.parent_path().string(), ec.message());
  int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::IoError, path.string(), errno_text());
  open_fds_.emplace(key, fd);
  return fd;
}

bool LogStore::append(const CombatLog& log) {
  if (mode_ != StoreMode::ReadWrite) throw Error(ErrorCode::IoError, root_.string(), "store opened read-only");
  validate(log);
  if (!is_safe_identifier(log.encounter_id))
    throw Error(ErrorCode::InvariantViolation, "encounter_id", "must match [A-Za-z0-9_.-]+");
  if (!find_era(log.patch_era)) throw Error(ErrorCode::EraUnknown, log.patch_era);
  if (known_ids_.count(log.log_id)) return false;

  PartitionKey key{log.patch_era, log.encounter_id};
  std::string line = serialize_log(log);
  line.push_back('\n');
  int fd = partition_fd(key);
  std::string_view rest = line;
  while (!rest.empty()) {
    ssize_t n = ::write(fd, rest.data(), rest.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::IoError, partition_path(key).string(), errno_text());
    }
    rest.remove_prefix(static_cast<std::size_t>(n));
  }
  if (durability_ == Durability::EveryAppend && ::fsync(fd) != 0)
    throw Error(ErrorCode::IoError, partition_path(key).string(), errno_text());

  ++index_[key];
  known_ids_.insert(log.log_id);
  dirty_.insert(key);
  return true;
}

void LogStore::sync() {
  if (mode_ != StoreMode::ReadWrite) return;
  for (const auto& key : dirty_) {
    auto it = open_fds_.find(key);
    if (it != open_fds_.end() && ::fsync(it->second) != 0)
      throw Error(ErrorCode::IoError, partition_path(key).string(), errno_text());
  }
  dirty_.clear();
  write_index();
}

std::vector<CombatLog> LogStore::scan(std::optional<std::string_view> era,
                                      std::optional<std::string_view> encounter) const {
  if (era && !find_era(*era)) throw Error(ErrorCode::EraUnknown, std::string(*era));
  std::vector<CombatLog> out;
  for (const auto& e : eras_) {
    if (era && e.label != *era) continue;
    fs::path dir = root_ / e.label;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".log") continue;
      if (encounter && entry.path().stem().string() != *encounter) continue;
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::string content = read_file(file);
      for_each_complete_line(content, [&](std::string_view line, std::size_t line_no) {
        try {
          out.push_back(parse_log_line(line));
        } catch (const Error& err) {
          throw Error(ErrorCode::IoError, file.string() + ":" + std::to_string(line_no),
                      std::string("corrupt partition: ") + err.what());
        }
      });
    }
  }
  std::sort(out.begin(), out.end(), [](const CombatLog& a, const CombatLog& b) {
    return std::tie(a.timestamp_utc, a.log_id) < std::tie(b.timestamp_utc, b.log_id);
  });
  return out;
}

}  // namespace balance
