#include <iostream>

#include <CLI11.hpp>

#include "app/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hyplab: radial NLS laboratory on the hyperbolic plane"};
  app.require_subcommand(1);

  hyplab::app::Invocation inv;
  std::string config;
  unsigned jobs = 0;
  std::string out;
  std::string cache;
  for (const auto& name : hyplab::app::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--jobs", jobs, "worker threads (overrides config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (overrides config)");
    sub->add_option("--cache-dir", cache, "eigenpair cache directory (default: $HYPLAB_CACHE_DIR)");
    sub->callback([&inv, name] { inv.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hyplab::app::kExitConfig;
  }

  inv.config_path = config;
  if (jobs > 0) inv.jobs = jobs;
  if (!out.empty()) inv.out = out;
  if (!cache.empty()) inv.cache_dir = cache;
  return hyplab::app::run(inv, std::cerr);
}
