#pragma once

// evident/frontend.hpp: pieces shared by the CLI and the HTTP service, so
// that both produce byte-identical canonical documents.

#include <filesystem>
#include <string>
#include <string_view>

#include "evident/engine.hpp"
#include "evident/store.hpp"

namespace evident {

// Full id, or an unambiguous hex prefix of at least 8 characters (with or
// without "sha256:"). Errors: `not_found` (default UnknownId); AmbiguousId.
ContainerId resolve_id(const Snapshot& snapshot, std::string_view text,
                       ErrorCode not_found = ErrorCode::UnknownId);

// A workspace directory, a .ekblog file or a .ekb snapshot export.
Snapshot load_snapshot(const std::filesystem::path& path);

std::string canonical_grid(const Snapshot& snapshot, bool permuted = false);
std::string canonical_status(const Snapshot& snapshot, const ContainerId& hypothesis);
std::string canonical_backlog(const Snapshot& snapshot);
std::string canonical_report(const Snapshot& snapshot, const ContainerId& test);
std::string canonical_verify(const VerificationReport& report);

}  // namespace evident
