#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evident::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

struct Environment {
  std::filesystem::path cwd = std::filesystem::current_path();
  // Value of EVIDENT_WORKSPACE, if set. --workspace still wins.
  std::optional<std::filesystem::path> workspace_override;
  std::function<std::int64_t()> clock;  // defaults to the system clock
};

// Runs one `evident` invocation; `args` excludes the program name.
// Returns 0 on success, 1 on an engine error (its name goes to `err`),
// 2 on a usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const Environment& env = {});

}  // namespace evident::cli
