#pragma once

// evident/workspace.hpp: a directory holding one EKB event log.
//
// Layout: <dir>/evident.ekblog (the log) and <dir>/.evident.lock (advisory
// flock taken by writers). One writer at a time; readers never lock and
// only ever see whole, newline-terminated records.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "evident/store.hpp"

namespace evident {

inline constexpr const char* kLogFileName = "evident.ekblog";
inline constexpr const char* kLockFileName = ".evident.lock";

// RAII exclusive flock. Throws WorkspaceLocked if another process holds it.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(const std::filesystem::path& dir);
  ~WorkspaceLock();
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  int fd_ = -1;
};

class Workspace {
 public:
  // Creates <dir>/evident.ekblog (and <dir> if needed). WorkspaceExists if a
  // log is already there.
  static Workspace init(const std::filesystem::path& dir);
  // NoWorkspace if there is no log; MalformedInput / ChainCorrupt if the
  // stored log does not load.
  static Workspace open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path log_path() const { return dir_ / kLogFileName; }
  const EventLog& log() const { return log_; }
  const Snapshot& snapshot() const { return log_.state(); }

  // Validates, then appends one record to the file under the lock. The
  // in-memory log is reloaded first if the file grew behind our back.
  const Event& append(EventKind kind, Json payload, std::int64_t timestamp = now_seconds());

  // Re-reads the log if the file size changed. Returns true if reloaded.
  bool refresh();

 private:
  explicit Workspace(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void load();

  std::filesystem::path dir_;
  EventLog log_;
  std::uintmax_t loaded_size_ = 0;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace evident
