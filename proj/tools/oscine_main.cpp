#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscine/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"oscine: reducibility and Sobolev-growth experiments for the "
               "driven quantum oscillator"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir;
  std::vector<std::string> overrides;

  bool list_only = false;
  app.add_flag("--list", list_only, "list registered experiments and exit");

  std::vector<CLI::App*> subs;
  for (const auto& name : oscine::registered_experiments()) {
    CLI::App* sub = app.add_subcommand(name, oscine::experiment_help(name));
    sub->add_option("--config", config_path, "TOML config file");
    sub->add_option("--set", overrides, "override a config key (key=value)")
        ->take_all();
    sub->add_option("--out", out_dir, "output directory");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  if (list_only || app.get_subcommands().empty()) {
    for (const auto& name : oscine::registered_experiments())
      std::printf("%-18s %s\n", name.c_str(), oscine::experiment_help(name).c_str());
    return list_only ? 0 : 1;
  }

  try {
    oscine::TomlLite toml;
    if (!config_path.empty()) toml = oscine::TomlLite::parse_file(config_path);
    for (const auto& kv : overrides) toml.set_override(kv);
    oscine::ExperimentConfig cfg = oscine::ExperimentConfig::from_toml(toml);
    cfg.name = app.get_subcommands().front()->get_name();
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const auto outcome = oscine::run_experiment(cfg);
    std::printf("%s: %s\n", cfg.name.c_str(), outcome.message.c_str());
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
