// Command-line front end: one subcommand per experiment.
//   stablebip <experiment> --config run.json [--seed N] [--out DIR]
// Exit status: 0 ok, 1 I/O, 2 bad config, 3 invariant violated, 4 numerical failure.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "stablebip/experiment.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw stablebip::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed Bayesian inverse problem experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  for (const auto& name : stablebip::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--out", out_dir, "overrides the config output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    stablebip::ExperimentConfig config = stablebip::parse_config(read_text(config_path));
    if (!config.experiment.empty() && config.experiment != experiment) {
      throw stablebip::ConfigError("experiment: config names '" + config.experiment +
                                   "' but the subcommand is '" + experiment + "'");
    }
    config.experiment = experiment;
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    const auto result = stablebip::run_experiment(config);
    for (const auto& f : result.files) std::cout << config.output_dir << "/" << f << "\n";
    return 0;
  } catch (const std::exception& e) {
    const int code = stablebip::exit_code_for(e);
    std::cerr << "stablebip " << experiment << ": " << e.what() << "\n";
    return code;
  }
}
