#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "diploid/config.hpp"

namespace diploid {

/// Names accepted by run_subcommand.
const std::vector<std::string>& subcommand_names();

struct RunRequest {
  std::string subcommand;
  /// Scenario name for the `scenario` subcommand.
  std::string scenario;
  RunConfig config;
  /// Replaces the scenario horizon when set (--t-end given explicitly).
  std::optional<double> scenario_t_end;
  /// Recorded verbatim in the meta file.
  std::string command_line;
};

/// Runs one subcommand, writing its artifacts and a `<name>.meta` file into
/// config.output.directory. Progress and summaries go to `log`.
/// Throws ValidationError or SimulationError on failure.
void run_subcommand(const RunRequest& request, std::ostream& log);

/// Version string recorded in meta files.
const char* version();

}  // namespace diploid
