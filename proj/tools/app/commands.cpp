#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "artifacts.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/heat_lp.hpp"
#include "hyplab/sampling.hpp"
#include "run_config.hpp"

namespace hyplab::app {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::string> cells(std::initializer_list<double> values) {
  std::vector<std::string> out;
  for (double v : values) out.push_back(format_number(v));
  return out;
}

struct Context {
  RunConfig cfg;
  const SpectralOperator& op;
  ArtifactWriter& out;
  std::ostream& log;
};

RadialField make_datum(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.datum == "rough") return make_rough_datum(ctx.op, cfg.s, cfg.seed, cfg.amplitude);
  const Eigen::VectorXd& r = ctx.op.grid().nodes();
  RadialField f(r.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    const double x = r[k] / cfg.datum_width;
    f[k] = cfg.amplitude * std::exp(-x * x);
  }
  return f;
}

std::vector<RadialField> random_samples(const Context& ctx) {
  std::mt19937_64 rng(ctx.cfg.seed);
  std::vector<RadialField> out;
  for (std::size_t i = 0; i < ctx.cfg.samples; ++i) out.push_back(random_smooth_field(ctx.op.grid(), rng));
  return out;
}

void write_ledger_csv(ArtifactWriter& out, const std::string& name, const HighLowLedger& ledger) {
  auto csv = out.open_csv(name, {"index", "a_start", "a_end", "partial", "l4_budget", "energy_start",
                                 "energy_increment", "zeta1_energy_drift", "zeta2_start_l2", "zeta2_l4",
                                 "zeta2_sup_l2", "zeta2_sup_h1", "zeta1_l4_4", "psi_l4", "u_hs_start",
                                 "weighted_sup_psi", "weighted_sup_zeta1", "weighted_sup_zeta2", "steps"});
  for (const auto& r : ledger.intervals) {
    write_csv_row(csv, {std::to_string(r.index), format_number(r.a_start), format_number(r.a_end),
                        r.partial ? "1" : "0", format_number(r.l4_budget), format_number(r.energy_start),
                        format_number(r.energy_increment), format_number(r.zeta1_energy_drift),
                        format_number(r.zeta2_start_l2), format_number(r.zeta2_l4), format_number(r.zeta2_sup_l2),
                        format_number(r.zeta2_sup_h1), format_number(r.zeta1_l4_4), format_number(r.psi_l4),
                        format_number(r.u_hs_start), format_number(r.weighted_sup_psi),
                        format_number(r.weighted_sup_zeta1), format_number(r.weighted_sup_zeta2),
                        std::to_string(r.steps)});
  }
}

int cmd_simulate(Context& ctx) {
  const FlowConfig flow = flow_config(ctx.cfg);
  if (flow.resolution_number(ctx.op) > std::numbers::pi) {
    ctx.log << "warning: dt * lambda_max = " << flow.resolution_number(ctx.op)
            << " > pi; the top of the spectrum is under-resolved in time\n";
  }
  const RadialField f0 = make_datum(ctx);
  Trajectory traj;
  int status = kExitOk;
  std::string error;
  try {
    traj = evolve_nls(ctx.op, f0, flow);
  } catch (const IntegrationError& e) {
    traj = e.partial();
    status = kExitRun;
    error = e.what();
  }
  {
    auto csv = ctx.out.open_csv("simulate.csv", {});
    write_trajectory_csv(csv, traj);
  }
  if (status != kExitOk) {
    ctx.log << "error: " << error << '\n';
    ctx.out.write_manifest(false, error);
    return status;
  }
  const auto& first = traj.snapshots.front();
  const auto& last = traj.back();
  ctx.out.write_summary({{"final_time", last.t},
                         {"snapshots", traj.snapshots.size()},
                         {"mass_drift", std::abs(last.mass - first.mass) / std::max(first.mass, 1e-300)},
                         {"energy_drift", std::abs(last.energy - first.energy) / std::max(std::abs(first.energy), 1e-300)},
                         {"l4_spacetime", last.l4_cum},
                         {"resolution_number", flow.resolution_number(ctx.op)},
                         {"under_resolved", traj.under_resolved}});
  ctx.out.write_manifest(true);
  return kExitOk;
}

int cmd_lp_verify(Context& ctx) {
  const auto samples = random_samples(ctx);
  const auto s_list = log_space(1e-3, 1e2, 21);
  auto csv = ctx.out.open_csv("lp_verify.csv", {"sample", "reconstruction_residual", "bernstein_low_max",
                                                "bernstein_high_max"});
  double worst_residual = 0.0;
  double low_c = 0.0;
  double high_c = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const LPLadder ladder = make_ladder(ctx.op, samples[i], ctx.cfg.ladder_points, ctx.cfg.jobs);
    const double res = reconstruction_residual(ctx.op, ladder, samples[i]);
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& row : bernstein_sweep(ctx.op, samples[i], ctx.cfg.bernstein_alpha, ctx.cfg.bernstein_beta, s_list)) {
      lo = std::max(lo, row.r_low);
      hi = std::max(hi, row.r_high);
    }
    worst_residual = std::max(worst_residual, res);
    low_c = std::max(low_c, lo);
    high_c = std::max(high_c, hi);
    auto row = cells({res, lo, hi});
    row.insert(row.begin(), std::to_string(i));
    write_csv_row(csv, row);
  }
  csv.close();
  ctx.out.write_summary({{"max_reconstruction_residual", worst_residual},
                         {"reconstruction_pass", worst_residual <= 1e-6},
                         {"bernstein_alpha", ctx.cfg.bernstein_alpha},
                         {"bernstein_beta", ctx.cfg.bernstein_beta},
                         {"bernstein_low_constant", low_c},
                         {"bernstein_high_constant", high_c},
                         {"bernstein_pass", low_c <= 1.5 && high_c <= 1.5}});
  ctx.out.write_manifest(true);
  return kExitOk;
}

json ledger_summary(const HighLowLedger& ledger) {
  std::size_t partial = 0;
  for (const auto& r : ledger.intervals) partial += r.partial ? 1 : 0;
  return {{"s0", ledger.config.s0},
          {"epsilon", ledger.config.epsilon},
          {"intervals", ledger.intervals.size()},
          {"partial_intervals", partial},
          {"datum_energy", ledger.datum_energy},
          {"low_energy", ledger.low_energy},
          {"psi0_l2", ledger.psi0_l2},
          {"eta0_h1", ledger.eta0_h1},
          {"max_positive_increment", ledger.max_positive_increment()},
          {"increment_floor", ledger.increment_floor()},
          {"u_hs_max", ledger.u_hs_max},
          {"u_mass_drift", ledger.u_mass_drift},
          {"max_zeta2_h1", ledger.max_zeta2_h1()},
          {"under_resolved", ledger.under_resolved}};
}

int cmd_highlow(Context& ctx) {
  const RadialField phi = make_datum(ctx);
  try {
    const HighLowLedger ledger = run_highlow(ctx.op, phi, highlow_config(ctx.cfg));
    write_ledger_csv(ctx.out, "highlow.csv", ledger);
    json summary = ledger_summary(ledger);
    summary["predicted_exponent"] = increment_exponent(ctx.cfg.s, ctx.cfg.p);
    ctx.out.write_summary(summary);
    ctx.out.write_manifest(true);
    return kExitOk;
  } catch (const RunError& e) {
    write_ledger_csv(ctx.out, "highlow.csv", e.partial());
    ctx.log << "error: " << e.what() << '\n';
    ctx.out.write_manifest(false, e.what());
    return kExitRun;
  }
}

int cmd_sweep(Context& ctx) {
  const RadialField phi = make_datum(ctx);
  const ScalingReport rep =
      increment_scaling_study(ctx.op, phi, effective_s0_list(ctx.cfg), highlow_config(ctx.cfg), ctx.cfg.jobs);
  auto csv = ctx.out.open_csv("sweep.csv", {"s0", "max_increment", "usable", "intervals", "u_hs_max", "zeta2_h1",
                                            "weighted_sup_psi", "weighted_sup_zeta1", "weighted_sup_zeta2",
                                            "eta0_h1", "psi0_l2"});
  for (const auto& p : rep.points) {
    write_csv_row(csv, {format_number(p.s0), format_number(p.max_increment), p.usable ? "1" : "0",
                        std::to_string(p.interval_count), format_number(p.u_hs_max), format_number(p.zeta2_h1),
                        format_number(p.weighted_sup_psi), format_number(p.weighted_sup_zeta1),
                        format_number(p.weighted_sup_zeta2), format_number(p.eta0_h1), format_number(p.psi0_l2)});
  }
  csv.close();
  const std::size_t tail = rep.points.size() - rep.onset_index;
  ctx.out.write_summary({{"s", rep.s},
                         {"p", rep.p},
                         {"points", rep.points.size()},
                         {"fitted_slope", rep.fitted_slope},
                         {"fitted_intercept", rep.fitted_intercept},
                         {"predicted_exponent", rep.predicted_exponent},
                         {"fitted_constant", rep.fitted_constant},
                         {"onset_s0", rep.onset_s0},
                         {"monotone_tail_points", tail},
                         {"hs_bound_constant", rep.hs_bound_constant},
                         {"zeta2_h1_slope", rep.zeta2_h1_slope},
                         {"psi_sup_slope", rep.psi_sup_slope},
                         {"zeta1_sup_slope", rep.zeta1_sup_slope},
                         {"zeta2_sup_slope", rep.zeta2_sup_slope}});
  ctx.out.write_manifest(true);
  return kExitOk;
}

int cmd_morawetz(Context& ctx) {
  const auto samples = random_samples(ctx);
  const InequalityReport bound = check_morawetz_bound(ctx.op, samples, ctx.cfg.caps.morawetz);
  {
    auto csv = ctx.out.open_csv("morawetz.csv", {"sample", "abs_action", "l2_h1_product", "ratio"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double ratio = bound.rhs[i] > 0.0 ? bound.lhs[i] / bound.rhs[i] : 0.0;
      auto row = cells({bound.lhs[i], bound.rhs[i], ratio});
      row.insert(row.begin(), std::to_string(i));
      write_csv_row(csv, row);
    }
  }
  FlowConfig flow = flow_config(ctx.cfg);
  flow.t_end = ctx.cfg.morawetz_t_end;
  flow.record_every = 1;
  const Trajectory traj = evolve_nls(ctx.op, make_datum(ctx), flow);
  const InequalityReport modified = check_modified_morawetz(ctx.op, traj, {}, ctx.cfg.caps.modified_morawetz);
  {
    auto csv = ctx.out.open_csv("modified_morawetz.csv", {"t", "l4_spacetime", "rhs", "ratio"});
    for (std::size_t j = 0; j < modified.lhs.size(); ++j) {
      write_csv_row(csv, cells({traj.snapshots[j + 1].t, modified.lhs[j], modified.rhs[j],
                                modified.rhs[j] > 0.0 ? modified.lhs[j] / modified.rhs[j] : 0.0}));
    }
  }
  json flat{{"morawetz_constant", bound.constant},
            {"morawetz_cap", bound.cap},
            {"morawetz_pass", bound.pass},
            {"modified_morawetz_constant", modified.constant},
            {"modified_morawetz_cap", modified.cap},
            {"modified_morawetz_pass", modified.pass},
            {"modified_morawetz_valid", modified.valid},
            {"modified_morawetz_note", modified.note}};
  ctx.out.write_summary(flat);
  ctx.out.write_manifest(true);
  return kExitOk;
}

int cmd_smoothing(Context& ctx) {
  const auto samples = random_samples(ctx);
  const LocalSmoothingReport rep = check_local_smoothing(ctx.op, samples, ctx.cfg.horizons, ctx.cfg.smoothing_eps,
                                                         ctx.cfg.weight, ctx.cfg.caps.smoothing);
  {
    auto csv = ctx.out.open_csv("smoothing.csv", {"sample", "t_end", "ratio"});
    for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
      for (std::size_t h = 0; h < rep.horizons.size(); ++h) {
        auto row = cells({rep.horizons[h], rep.ratios[i][h]});
        row.insert(row.begin(), std::to_string(i));
        write_csv_row(csv, row);
      }
    }
  }
  ctx.out.write_summary({{"constant", rep.report.constant},
                         {"cap", rep.report.cap},
                         {"pass", rep.report.pass},
                         {"saturated", rep.saturated},
                         {"max_last_growth", rep.max_last_growth},
                         {"weight_convention", std::string(to_string(ctx.cfg.weight))},
                         {"smoothing_eps", ctx.cfg.smoothing_eps}});
  ctx.out.write_manifest(true);
  return kExitOk;
}

int cmd_sobolev(Context& ctx) {
  const auto random = random_samples(ctx);
  std::vector<RadialField> bumps;
  const RadialGrid& grid = ctx.op.grid();
  const double centre = grid.r_max() / 5.0;
  for (double w : log_space(1.0, 3.0 * grid.spacing(), 10)) bumps.push_back(bump_field(grid, centre, w));
  const std::vector<double> alphas{0.3, 0.5, 0.9};

  std::vector<RadialField> all = random;
  all.insert(all.end(), bumps.begin(), bumps.end());
  const RadialSobolevReport rep = check_radial_sobolev(ctx.op, all, alphas, ctx.cfg.caps.sobolev);
  {
    std::vector<std::string> cols{"sample", "family", "weighted_ratio"};
    for (double a : alphas) cols.push_back("alpha_" + format_number(a) + "_ratio");
    cols.push_back("gn_ratio");
    auto csv = ctx.out.open_csv("sobolev.csv", cols);
    auto ratio = [](const InequalityReport& r, std::size_t i) { return r.rhs[i] > 0.0 ? r.lhs[i] / r.rhs[i] : 0.0; };
    for (std::size_t i = 0; i < all.size(); ++i) {
      std::vector<std::string> row{std::to_string(i), i < random.size() ? "random" : "bump",
                                   format_number(ratio(rep.weighted, i))};
      for (const auto& v : rep.alpha_variants) row.push_back(format_number(ratio(v, i)));
      row.push_back(format_number(ratio(rep.gagliardo_nirenberg, i)));
      write_csv_row(csv, row);
    }
  }
  json summary{{"weighted_constant", rep.weighted.constant},
               {"gn_constant", rep.gagliardo_nirenberg.constant},
               {"cap", ctx.cfg.caps.sobolev},
               {"pass", rep.pass()}};
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    std::string key = "alpha_" + format_number(alphas[a]) + "_constant";
    std::replace(key.begin(), key.end(), '.', '_');
    summary[key] = rep.alpha_variants[a].constant;
  }
  ctx.out.write_summary(summary);
  ctx.out.write_manifest(true);
  return kExitOk;
}

int cmd_scatter(Context& ctx) {
  const auto& times = ctx.cfg.scatter_times;
  std::size_t stride = 0;
  for (double t : times) {
    const double steps = t / ctx.cfg.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6) {
      throw ConfigFieldError("scatter_times", "every time must be a whole number of steps");
    }
    stride = std::gcd(stride, static_cast<std::size_t>(std::llround(steps)));
  }
  FlowConfig flow = flow_config(ctx.cfg);
  flow.t_end = times.back();
  flow.record_every = stride;
  const Trajectory traj = evolve_nls(ctx.op, make_datum(ctx), flow);
  const ScatteringReport rep = scattering_diagnostic(ctx.op, traj, ctx.cfg.s, times);
  {
    auto csv = ctx.out.open_csv("scatter.csv", {"t_from", "t_to", "hs_difference", "decrement_ratio"});
    for (std::size_t i = 0; i < rep.differences.size(); ++i) {
      const double ratio = i == 0 ? std::nan("") : rep.decrement_ratios[i - 1];
      write_csv_row(csv, cells({times[i], times[i + 1], rep.differences[i], ratio}));
    }
  }
  ctx.out.write_summary({{"backend", std::string(to_string(ctx.cfg.backend))},
                         {"s", ctx.cfg.s},
                         {"final_difference", rep.differences.back()},
                         {"decreasing", rep.decreasing()},
                         {"under_resolved", traj.under_resolved}});
  ctx.out.write_manifest(true);
  return kExitOk;
}

using Command = std::function<int(Context&)>;

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"simulate", cmd_simulate}, {"lp-verify", cmd_lp_verify}, {"highlow", cmd_highlow},
      {"sweep", cmd_sweep},       {"morawetz", cmd_morawetz},   {"smoothing", cmd_smoothing},
      {"sobolev", cmd_sobolev},   {"scatter", cmd_scatter}};
  return table;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"simulate", "lp-verify", "highlow", "sweep",
                                              "morawetz", "smoothing", "sobolev", "scatter"};
  return names;
}

int run(const Invocation& inv, std::ostream& log) {
  const auto it = commands().find(inv.subcommand);
  if (it == commands().end()) {
    log << "error: unknown subcommand '" << inv.subcommand << "'\n";
    return kExitConfig;
  }
  RunConfig cfg;
  try {
    cfg = load_config(inv.config_path);
    if (inv.jobs) cfg.jobs = *inv.jobs;
    if (inv.out) cfg.output_dir = inv.out->string();
    validate(cfg);
  } catch (const ConfigFieldError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::optional<fs::path> cache_dir = inv.cache_dir;
  if (!cache_dir) {
    if (const char* env = std::getenv("HYPLAB_CACHE_DIR"); env != nullptr && *env != '\0') cache_dir = fs::path(env);
  }

  std::optional<ArtifactWriter> writer;
  try {
    const RadialGrid grid = make_grid(GeometryBackend{cfg.backend}, cfg.r_max, cfg.n);
    const SpectralOperator op = build_operator_cached(grid, cache_dir);
    writer.emplace(fs::path(cfg.output_dir), inv.subcommand, to_json(cfg), hex64(op.content_hash()));
    Context ctx{cfg, op, *writer, log};
    return it->second(ctx);
  } catch (const ConfigFieldError& e) {
    log << "config error: " << e.what() << '\n';
    if (writer) writer->write_manifest(false, e.what());
    return kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    if (writer) writer->write_manifest(false, e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    if (writer) writer->write_manifest(false, e.what());
    return kExitRun;
  }
}

}  // namespace hyplab::app
