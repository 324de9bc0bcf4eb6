#include "evident/frontend.hpp"

#include "evident/algebra.hpp"
#include "evident/workspace.hpp"

namespace fs = std::filesystem;

namespace evident {

ContainerId resolve_id(const Snapshot& snapshot, std::string_view text, ErrorCode not_found) {
  if (ContainerId::well_formed(text)) {
    auto id = ContainerId::parse(text);
    if (!snapshot.contains(id))
      throw Error(not_found, "no container " + id.str(), {id.str()});
    return id;
  }
  std::string_view hex = text;
  if (hex.substr(0, kDigestPrefix.size()) == kDigestPrefix) hex.remove_prefix(kDigestPrefix.size());
  if (hex.size() < 8 || hex.size() > 64 || !is_lower_hex(hex))
    throw Error(not_found,
                "'" + std::string(text) + "' is not an id or a hex prefix of at least 8 characters");
  std::string lo = std::string(kDigestPrefix) + std::string(hex);
  std::vector<ContainerId> matches;
  for (auto it = snapshot.entries().lower_bound(ContainerId::parse(lo + std::string(64 - hex.size(), '0')));
       it != snapshot.entries().end() && it->first.hex().substr(0, hex.size()) == hex; ++it)
    matches.push_back(it->first);
  if (matches.empty()) throw Error(not_found, "no container matches '" + std::string(text) + "'");
  if (matches.size() > 1) {
    std::vector<std::string> ids;
    for (const auto& m : matches) ids.push_back(m.str());
    throw Error(ErrorCode::AmbiguousId, "'" + std::string(text) + "' matches several containers",
                ids);
  }
  return matches.front();
}

Snapshot load_snapshot(const fs::path& path) {
  if (fs::is_directory(path)) return Workspace::open(path).snapshot();
  if (!fs::is_regular_file(path))
    throw Error(ErrorCode::NoWorkspace, path.string() + " is neither a workspace nor a file");
  std::string bytes = read_file(path);
  if (path.extension() == ".ekblog") return replay(EventLog::parse(bytes));
  return deserialize_snapshot(bytes);
}

std::string canonical_grid(const Snapshot& snapshot, bool permuted) {
  GridView grid = grid_view(snapshot);
  if (permuted) grid = permute(grid);
  return canonical_dump(grid_json(snapshot, grid));
}

std::string canonical_status(const Snapshot& snapshot, const ContainerId& hypothesis) {
  return canonical_dump(status_json(hypothesis_status(snapshot, hypothesis)));
}

std::string canonical_backlog(const Snapshot& snapshot) {
  return canonical_dump(backlog_json(backlog(snapshot)));
}

std::string canonical_report(const Snapshot& snapshot, const ContainerId& test) {
  return canonical_dump(report_json(snapshot, knowledge_report(snapshot, test)));
}

std::string canonical_verify(const VerificationReport& report) {
  return canonical_dump(verification_json(report));
}

}  // namespace evident
