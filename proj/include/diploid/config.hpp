#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diploid/model.hpp"

namespace diploid {

struct SchemeConfig {
  double dt = 1e-3;
  double eps_n = 1e-4;
  double eps_x = 1e-4;
  double t_end = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t threads = 1;

  bool operator==(const SchemeConfig&) const = default;
};

/// Subcommand-specific settings; each subcommand reads the keys it needs.
struct ExperimentConfig {
  std::int64_t K = 100;
  std::vector<std::int64_t> K_list{50, 100, 200, 400};
  /// Initial rescaled genotype masses.
  GenotypeState z0{1.0, 2.0, 1.0};
  std::uint64_t replicates = 500;
  std::int64_t order = 1;
  /// Initial population size and allele frequency of diffusion runs.
  double n0 = 10.0;
  double x0 = 0.5;
  /// SDE coordinates: na, nx, s or haploid.
  std::string kind = "nx";
  bool stop_at_fixation = false;
  std::uint64_t particles = 2000;
  double snapshot_every = 1.0;
  /// Output thinning: keep every n-th step of SDE and ODE runs.
  std::uint64_t record_every = 1;
  /// Exact-process recording: events, grid or final.
  std::string record = "events";
  double grid_step = 0.1;
  /// Exact-process rate scaling: slow-fast or logistic.
  std::string scaling = "slow-fast";
  /// Interior sample size of the drift checks.
  std::uint64_t samples = 1000;
  /// Window length of the stationarity check.
  double window = 5.0;

  bool operator==(const ExperimentConfig&) const = default;
};

struct OutputConfig {
  std::string directory = ".";
  /// Any of csv, svg.
  std::vector<std::string> formats{"csv", "svg"};

  bool wants(const std::string& format) const;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  DemographicParams model = DemographicParams::uniform(1.0, 0.0, 0.1, 1.0);
  SchemeConfig scheme;
  ExperimentConfig experiment;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

struct ParsedConfig {
  RunConfig config;
  /// Non-fatal diagnostics (H1 not established, ...).
  std::vector<std::string> warnings;
  H1Report h1;
};

/// Parses `[section]` headers and `key = value` lines; `#` starts a comment.
/// The [model] section is required; missing keys keep their defaults.
/// Errors carry the line number.
ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

/// Canonical text form; parse_config(emit_config(c)).config == c.
std::string emit_config(const RunConfig& config);

/// Sets "section.key" to `value` with the same validation as the parser.
void apply_override(RunConfig& config, const std::string& dotted_key, const std::string& value);
/// Parses "section.key=value" and applies it.
void apply_assignment(RunConfig& config, const std::string& assignment);

/// Keys accepted in a section, in canonical order.
std::vector<std::string> config_keys(const std::string& section);

/// Shortest round-trip representation: 17 significant digits.
std::string format_number(double value);

}  // namespace diploid
