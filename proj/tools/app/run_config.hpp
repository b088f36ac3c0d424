#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyplab/analysis.hpp"
#include "hyplab/geometry.hpp"
#include "hyplab/highlow.hpp"

namespace hyplab::app {

// Invalid or missing config entry; `field` names the offending key.
class ConfigFieldError : public std::runtime_error {
 public:
  ConfigFieldError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct InequalityCaps {
  double morawetz = 2.0;
  double modified_morawetz = 10.0;
  double sobolev = 10.0;
  double smoothing = 10.0;
};

struct RunConfig {
  // required
  GeometryKind backend = GeometryKind::Hyperbolic2;
  double r_max = 15.0;
  std::size_t n = 512;

  int p = 3;
  double s = 0.9;
  double s0 = 1e-2;
  std::vector<double> s0_list;
  double epsilon = 1e-2;
  double dt = 1e-3;
  double t_end = 20.0;
  std::size_t record_every = 100;
  std::string datum = "rough";  // rough | gaussian
  double datum_width = 1.0;     // gaussian width
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  unsigned jobs = 1;
  InequalityCaps caps;
  WeightConvention weight = WeightConvention::Polynomial;
  double smoothing_eps = 0.1;
  std::vector<double> horizons{1.0, 10.0, 100.0};
  std::size_t samples = 50;
  std::size_t ladder_points = 64;
  double bernstein_alpha = 0.75;
  double bernstein_beta = 0.25;
  double morawetz_t_end = 1.0;
  std::vector<double> scatter_times{4.0, 8.0, 16.0};
  std::size_t max_intervals = 10000;
};

// Throws ConfigFieldError for a missing required key (backend, r_max, n),
// an unknown key, a type mismatch or an out-of-range value.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);
void validate(const RunConfig& cfg);

FlowConfig flow_config(const RunConfig& cfg);
HighLowConfig highlow_config(const RunConfig& cfg);
std::vector<double> effective_s0_list(const RunConfig& cfg);

}  // namespace hyplab::app
