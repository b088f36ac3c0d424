#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hyplab/errors.hpp"
#include "hyplab/heat_lp.hpp"

namespace hyplab::app {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "backend",         "r_max",          "n",              "p",
      "s",               "s0",             "s0_list",        "epsilon",
      "dt",              "t_end",          "record_every",   "datum",
      "datum_width",     "amplitude",      "seed",           "output_dir",
      "jobs",            "caps",           "weight_convention", "smoothing_eps",
      "horizons",        "samples",        "ladder_points",  "bernstein_alpha",
      "bernstein_beta",  "morawetz_t_end", "scatter_times",  "max_intervals"};
  return keys;
}

template <typename T>
T read(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigFieldError(key, std::string("wrong type (") + e.what() + ")");
  }
}

double read_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) throw ConfigFieldError(key, "expected a number");
  return j.at(key).get<double>();
}

std::size_t read_count(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigFieldError(key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> read_list(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigFieldError(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigFieldError(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigFieldError(key, message);
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigFieldError("<root>", "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().contains(key)) throw ConfigFieldError(key, "unknown field");
  }
  for (const char* key : {"backend", "r_max", "n"}) {
    if (!j.contains(key)) throw ConfigFieldError(key, "missing required field");
  }

  RunConfig cfg;
  try {
    cfg.backend = parse_geometry(read<std::string>(j, "backend"));
  } catch (const ConfigError& e) {
    throw ConfigFieldError("backend", e.what());
  }
  cfg.r_max = read_number(j, "r_max");
  cfg.n = read_count(j, "n");

  if (j.contains("p")) cfg.p = static_cast<int>(read_count(j, "p"));
  if (j.contains("s")) cfg.s = read_number(j, "s");
  if (j.contains("s0")) cfg.s0 = read_number(j, "s0");
  if (j.contains("s0_list")) cfg.s0_list = read_list(j, "s0_list");
  if (j.contains("epsilon")) cfg.epsilon = read_number(j, "epsilon");
  if (j.contains("dt")) cfg.dt = read_number(j, "dt");
  if (j.contains("t_end")) cfg.t_end = read_number(j, "t_end");
  if (j.contains("record_every")) cfg.record_every = read_count(j, "record_every");
  if (j.contains("datum")) cfg.datum = read<std::string>(j, "datum");
  if (j.contains("datum_width")) cfg.datum_width = read_number(j, "datum_width");
  if (j.contains("amplitude")) cfg.amplitude = read_number(j, "amplitude");
  if (j.contains("seed")) cfg.seed = read<std::uint64_t>(j, "seed");
  if (j.contains("output_dir")) cfg.output_dir = read<std::string>(j, "output_dir");
  if (j.contains("jobs")) cfg.jobs = static_cast<unsigned>(read_count(j, "jobs"));
  if (j.contains("caps")) {
    const json& c = j.at("caps");
    require(c.is_object(), "caps", "expected an object");
    for (const auto& [key, value] : c.items()) {
      const std::string field = "caps." + key;
      require(value.is_number(), field, "expected a number");
      if (key == "morawetz") {
        cfg.caps.morawetz = value.get<double>();
      } else if (key == "modified_morawetz") {
        cfg.caps.modified_morawetz = value.get<double>();
      } else if (key == "sobolev") {
        cfg.caps.sobolev = value.get<double>();
      } else if (key == "smoothing") {
        cfg.caps.smoothing = value.get<double>();
      } else {
        throw ConfigFieldError(field, "unknown field");
      }
    }
  }
  if (j.contains("weight_convention")) {
    try {
      cfg.weight = parse_weight_convention(read<std::string>(j, "weight_convention"));
    } catch (const ConfigError& e) {
      throw ConfigFieldError("weight_convention", e.what());
    }
  }
  if (j.contains("smoothing_eps")) cfg.smoothing_eps = read_number(j, "smoothing_eps");
  if (j.contains("horizons")) cfg.horizons = read_list(j, "horizons");
  if (j.contains("samples")) cfg.samples = read_count(j, "samples");
  if (j.contains("ladder_points")) cfg.ladder_points = read_count(j, "ladder_points");
  if (j.contains("bernstein_alpha")) cfg.bernstein_alpha = read_number(j, "bernstein_alpha");
  if (j.contains("bernstein_beta")) cfg.bernstein_beta = read_number(j, "bernstein_beta");
  if (j.contains("morawetz_t_end")) cfg.morawetz_t_end = read_number(j, "morawetz_t_end");
  if (j.contains("scatter_times")) cfg.scatter_times = read_list(j, "scatter_times");
  if (j.contains("max_intervals")) cfg.max_intervals = read_count(j, "max_intervals");
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigFieldError("<file>", "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigFieldError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["backend"] = std::string(to_string(cfg.backend));
  j["r_max"] = cfg.r_max;
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["s"] = cfg.s;
  j["s0"] = cfg.s0;
  j["s0_list"] = cfg.s0_list;
  j["epsilon"] = cfg.epsilon;
  j["dt"] = cfg.dt;
  j["t_end"] = cfg.t_end;
  j["record_every"] = cfg.record_every;
  j["datum"] = cfg.datum;
  j["datum_width"] = cfg.datum_width;
  j["amplitude"] = cfg.amplitude;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["jobs"] = cfg.jobs;
  j["caps"] = {{"morawetz", cfg.caps.morawetz},
               {"modified_morawetz", cfg.caps.modified_morawetz},
               {"sobolev", cfg.caps.sobolev},
               {"smoothing", cfg.caps.smoothing}};
  j["weight_convention"] = std::string(to_string(cfg.weight));
  j["smoothing_eps"] = cfg.smoothing_eps;
  j["horizons"] = cfg.horizons;
  j["samples"] = cfg.samples;
  j["ladder_points"] = cfg.ladder_points;
  j["bernstein_alpha"] = cfg.bernstein_alpha;
  j["bernstein_beta"] = cfg.bernstein_beta;
  j["morawetz_t_end"] = cfg.morawetz_t_end;
  j["scatter_times"] = cfg.scatter_times;
  j["max_intervals"] = cfg.max_intervals;
  return j;
}

void validate(const RunConfig& cfg) {
  require(std::isfinite(cfg.r_max) && cfg.r_max > 0.0, "r_max", "must be > 0");
  require(cfg.n >= 16, "n", "must be >= 16");
  require(cfg.p >= 3, "p", "must be >= 3");
  require(cfg.s > 0.0 && cfg.s <= 1.0, "s", "must lie in (0, 1]");
  require(cfg.s0 > 0.0, "s0", "must be > 0");
  for (double v : cfg.s0_list) require(v > 0.0, "s0_list", "entries must be > 0");
  require(cfg.epsilon > 0.0, "epsilon", "must be > 0");
  require(std::isfinite(cfg.dt) && cfg.dt > 0.0, "dt", "must be > 0");
  require(std::isfinite(cfg.t_end) && cfg.t_end >= 0.0, "t_end", "must be >= 0");
  require(cfg.record_every >= 1, "record_every", "must be >= 1");
  require(cfg.datum == "rough" || cfg.datum == "gaussian", "datum", "must be 'rough' or 'gaussian'");
  if (cfg.datum == "rough") require(cfg.s > 0.5 && cfg.s < 1.0, "s", "rough datum needs s in (0.5, 1)");
  require(cfg.datum_width > 0.0, "datum_width", "must be > 0");
  require(std::isfinite(cfg.amplitude), "amplitude", "must be finite");
  require(cfg.jobs >= 1, "jobs", "must be >= 1");
  require(cfg.caps.morawetz > 0.0, "caps.morawetz", "must be > 0");
  require(cfg.caps.modified_morawetz > 0.0, "caps.modified_morawetz", "must be > 0");
  require(cfg.caps.sobolev > 0.0, "caps.sobolev", "must be > 0");
  require(cfg.caps.smoothing > 0.0, "caps.smoothing", "must be > 0");
  require(cfg.smoothing_eps > 0.0, "smoothing_eps", "must be > 0");
  require(!cfg.horizons.empty(), "horizons", "must not be empty");
  for (double v : cfg.horizons) require(v > 0.0, "horizons", "entries must be > 0");
  require(cfg.samples >= 1, "samples", "must be >= 1");
  require(cfg.ladder_points >= 32, "ladder_points", "must be >= 32");
  require(cfg.bernstein_beta >= 0.0 && cfg.bernstein_beta < cfg.bernstein_alpha &&
              cfg.bernstein_alpha < cfg.bernstein_beta + 1.0,
          "bernstein_alpha", "need 0 <= beta < alpha < beta + 1");
  require(cfg.morawetz_t_end > 0.0, "morawetz_t_end", "must be > 0");
  require(cfg.scatter_times.size() >= 3, "scatter_times", "need at least three times");
  for (std::size_t i = 0; i < cfg.scatter_times.size(); ++i) {
    require(cfg.scatter_times[i] > 0.0 && (i == 0 || cfg.scatter_times[i] > cfg.scatter_times[i - 1]),
            "scatter_times", "must be positive and increasing");
  }
  require(cfg.max_intervals >= 1, "max_intervals", "must be >= 1");
}

FlowConfig flow_config(const RunConfig& cfg) {
  FlowConfig f;
  f.p = cfg.p;
  f.dt = cfg.dt;
  f.t_end = cfg.t_end;
  f.record_every = cfg.record_every;
  f.sobolev_index = cfg.s;
  return f;
}

HighLowConfig highlow_config(const RunConfig& cfg) {
  HighLowConfig h;
  h.s0 = cfg.s0;
  h.epsilon = cfg.epsilon;
  h.s = cfg.s;
  h.flow = flow_config(cfg);
  h.max_intervals = cfg.max_intervals;
  return h;
}

std::vector<double> effective_s0_list(const RunConfig& cfg) {
  if (!cfg.s0_list.empty()) return cfg.s0_list;
  return log_space(std::pow(10.0, -1.5), 1e-3, 6);
}

}  // namespace hyplab::app
