#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hyplab::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRun = 3;

struct Invocation {
  std::string subcommand;
  std::filesystem::path config_path;
  std::optional<unsigned> jobs;
  std::optional<std::filesystem::path> out;
  // Falls back to HYPLAB_CACHE_DIR when unset.
  std::optional<std::filesystem::path> cache_dir;
};

const std::vector<std::string>& subcommand_names();

// Loads and validates the config, builds (or loads) the operator and runs the
// subcommand. Returns an exit status; diagnostics go to `log`.
int run(const Invocation& inv, std::ostream& log);

}  // namespace hyplab::app
