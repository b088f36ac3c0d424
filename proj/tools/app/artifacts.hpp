#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace hyplab::app {

// Shortest round-trip decimal form; the same value always prints the same way.
std::string format_number(double v);

// Every file written for one subcommand: CSVs start with a '#' header block
// carrying the resolved config and the eigenpair cache hash; the summary JSON
// carries both as flat keys. The MANIFEST lists the files and whether the run
// finished.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, std::string subcommand, nlohmann::json resolved_config,
                 std::string cache_hash);

  // Opens <name>, writes the header block and, if non-empty, the column row.
  std::ofstream open_csv(const std::string& name, const std::vector<std::string>& columns);
  void write_summary(nlohmann::json summary);
  void write_manifest(bool complete, const std::string& error = {});

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string subcommand_;
  nlohmann::json config_;
  std::string cache_hash_;
  std::vector<std::string> files_;
};

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace hyplab::app
