// Command-line front end: parses flags and the config file, then dispatches to
// run_subcommand. Exit codes: 0 success, 1 usage, 2 validation, 3 runtime.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diploid/commands.hpp"
#include "diploid/config.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string join_arguments(int argc, char** argv) {
  std::string line;
  for (int i = 0; i < argc; ++i) {
    if (i) line += ' ';
    line += argv[i];
  }
  return line;
}

std::string flag_names(const std::string& key) {
  std::string names = "--" + key;
  std::string dashed = key;
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  if (dashed != key) names += ",--" + dashed;
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diploid population simulator: exact process, deterministic and diffusion limits, "
               "and quasi-stationary estimates"};
  app.set_version_flag("--version", std::string(diploid::version()));
  app.require_subcommand(1);
  // Global flags may also follow the subcommand name.
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> threads;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::vector<std::string> assignments;

  app.add_option("--config", config_path, "Config file with [model] [scheme] [experiment] [output]")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Base random seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Upper bound on worker threads")->check(CLI::PositiveNumber);
  app.add_option("--dt", dt, "Time step of discretized schemes");
  app.add_option("--t-end", t_end, "Time horizon");
  app.add_option("--set", assignments, "Override any config key: section.key=value (repeatable)");

  // Every experiment key is also a flag on each subcommand.
  const std::vector<std::string> experiment_keys = diploid::config_keys("experiment");
  std::map<std::string, std::map<std::string, std::string>> sub_values;
  std::string scenario_name;

  const std::map<std::string, std::string> descriptions{
      {"simulate-exact", "Exact event-driven simulation of the genotype counts"},
      {"ode", "Deterministic limit: numerical flow and closed forms"},
      {"simulate-sde", "One path of a diffusion limit"},
      {"checks", "Gradient, cross-partial and F reports of the Kolmogorov drift"},
      {"y-decay", "Second moment of the Hardy-Weinberg deviation across K"},
      {"fleming-viot", "Particle estimate of the quasi-stationary allele frequency law"},
      {"scenario", "Preset quasi-stationary run: neutral, overdominance or niches"},
  };
  for (const auto& name : diploid::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    if (name == "scenario") {
      sub->add_option("name", scenario_name, "Scenario preset")
          ->required()
          ->check(CLI::IsMember({"neutral", "overdominance", "niches"}));
    }
    for (const auto& key : experiment_keys) {
      sub->add_option(flag_names(key), sub_values[name][key], "Sets experiment." + key);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string subcommand = chosen->get_name();

  try {
    diploid::ParsedConfig parsed = config_path.empty() ? diploid::parse_config("[model]\n")
                                                       : diploid::load_config(config_path);
    for (const auto& warning : parsed.warnings) std::cerr << warning << '\n';

    diploid::RunRequest request;
    request.subcommand = subcommand;
    request.scenario = scenario_name;
    request.command_line = join_arguments(argc, argv);
    diploid::RunConfig& config = parsed.config;

    if (seed) config.scheme.seed = *seed;
    if (out_dir) diploid::apply_override(config, "output.directory", *out_dir);
    if (threads) config.scheme.threads = *threads;
    if (dt) diploid::apply_override(config, "scheme.dt", diploid::format_number(*dt));
    if (t_end) {
      diploid::apply_override(config, "scheme.t_end", diploid::format_number(*t_end));
      request.scenario_t_end = *t_end;
    }
    for (const auto& assignment : assignments) diploid::apply_assignment(config, assignment);
    for (const auto& key : experiment_keys) {
      if (chosen->count("--" + key) > 0) {
        diploid::apply_override(config, "experiment." + key, sub_values[subcommand][key]);
      }
    }
    request.config = config;
    diploid::run_subcommand(request, std::cout);
  } catch (const diploid::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
