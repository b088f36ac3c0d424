#include "artifacts.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hyplab::app {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out << c;
    } else {
      out << '"';
      for (char ch : c) out << (ch == '"' ? "\"\"" : std::string(1, ch));
      out << '"';
    }
  }
  out << '\n';
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, std::string subcommand, nlohmann::json resolved_config,
                               std::string cache_hash)
    : dir_(std::move(dir)),
      subcommand_(std::move(subcommand)),
      config_(std::move(resolved_config)),
      cache_hash_(std::move(cache_hash)) {
  std::filesystem::create_directories(dir_);
}

std::ofstream ArtifactWriter::open_csv(const std::string& name, const std::vector<std::string>& columns) {
  std::ofstream out(dir_ / name, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
  files_.push_back(name);
  out << "# hyplab " << subcommand_ << '\n';
  out << "# config: " << config_.dump() << '\n';
  out << "# eigen_cache_hash: " << cache_hash_ << '\n';
  if (!columns.empty()) write_csv_row(out, columns);
  return out;
}

void ArtifactWriter::write_summary(nlohmann::json summary) {
  summary["subcommand"] = subcommand_;
  summary["resolved_config"] = config_.dump();
  summary["eigen_cache_hash"] = cache_hash_;
  const std::string name = subcommand_ + "_summary.json";
  std::ofstream out(dir_ / name, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
  out << summary.dump(2) << '\n';
  files_.push_back(name);
}

void ArtifactWriter::write_manifest(bool complete, const std::string& error) {
  std::ofstream out(dir_ / "MANIFEST", std::ios::trunc);
  out << "subcommand: " << subcommand_ << '\n';
  out << "status: " << (complete ? "complete" : "incomplete") << '\n';
  if (!error.empty()) out << "error: " << error << '\n';
  out << "eigen_cache_hash: " << cache_hash_ << '\n';
  out << "files:\n";
  for (const auto& f : files_) out << "  " << f << '\n';
}

}  // namespace hyplab::app
