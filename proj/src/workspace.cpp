#include "evident/workspace.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace evident {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

WorkspaceLock::WorkspaceLock(const fs::path& dir) {
  fs::path lock = dir / kLockFileName;
  fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0)
    throw Error(ErrorCode::IoError, "cannot open lock file " + lock.string() + ": " +
                                        std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::WorkspaceLocked, "another process is writing " + dir.string());
  }
}

WorkspaceLock::~WorkspaceLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

Workspace Workspace::init(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  Workspace ws(dir);
  WorkspaceLock lock(dir);
  if (fs::exists(ws.log_path()))
    throw Error(ErrorCode::WorkspaceExists, ws.log_path().string() + " already exists");
  std::ofstream out(ws.log_path(), std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + ws.log_path().string());
  return ws;
}

Workspace Workspace::open(const fs::path& dir) {
  Workspace ws(dir);
  if (!fs::is_regular_file(ws.log_path()))
    throw Error(ErrorCode::NoWorkspace, "no " + std::string(kLogFileName) + " in " + dir.string());
  ws.load();
  return ws;
}

void Workspace::load() {
  std::string bytes = read_file(log_path());
  EventLog log = EventLog::parse(bytes);
  (void)log.state();  // verify + replay now, not on first use
  log_ = std::move(log);
  loaded_size_ = bytes.size();
}

bool Workspace::refresh() {
  std::error_code ec;
  auto size = fs::file_size(log_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot stat " + log_path().string());
  if (size == loaded_size_) return false;
  load();
  return true;
}

const Event& Workspace::append(EventKind kind, Json payload, std::int64_t timestamp) {
  WorkspaceLock lock(dir_);
  refresh();
  EventLog next = append_event(log_, kind, std::move(payload), timestamp);
  std::string line = serialize_event(next.events().back()) + "\n";

  int fd = ::open(log_path().c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (fd < 0) throw Error(ErrorCode::IoError, "cannot open " + log_path().string());
  // Single write of the whole record; readers see all of it or none.
  ssize_t written = ::write(fd, line.data(), line.size());
  bool ok = written == static_cast<ssize_t>(line.size()) && ::fsync(fd) == 0;
  ::close(fd);
  if (!ok) throw Error(ErrorCode::IoError, "short write to " + log_path().string());

  log_ = std::move(next);
  loaded_size_ += line.size();
  return log_.events().back();
}

}  // namespace evident
