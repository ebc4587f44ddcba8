#include "diploid/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "diploid/diffusion.hpp"
#include "diploid/exact_process.hpp"
#include "diploid/fleming_viot.hpp"
#include "diploid/ode_limit.hpp"
#include "diploid/output.hpp"
#include "diploid/potential.hpp"

#ifndef DIPLOID_VERSION
#define DIPLOID_VERSION "0.0.0"
#endif

namespace diploid {

namespace fs = std::filesystem;

const char* version() { return DIPLOID_VERSION; }

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"simulate-exact", "ode",          "simulate-sde",
                                              "checks",         "y-decay",      "fleming-viot",
                                              "scenario"};
  return names;
}

namespace {

// Opens files in the output directory and remembers what was written.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const RunConfig& config) : directory_(config.output.directory) {
    std::error_code ec;
    fs::create_directories(directory_, ec);
    if (ec) {
      throw SimulationError("cannot create output directory '" + directory_.string() +
                            "': " + ec.message());
    }
  }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) {
    const fs::path path = directory_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot write '" + path.string() + "'");
    writer(out);
    out.flush();
    if (!out) throw SimulationError("write failed for '" + path.string() + "'");
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path directory_;
  std::vector<std::string> files_;
};

void write_meta(ArtifactWriter& writer, const RunRequest& request, const RunConfig& effective,
                const std::vector<std::string>& notes) {
  const std::vector<std::string> artifacts = writer.files();
  const std::string name = request.subcommand == "scenario"
                               ? "scenario-" + request.scenario + ".meta"
                               : request.subcommand + ".meta";
  writer.write(name, [&](std::ostream& out) {
    out << "# diploid " << version() << " run record; re-run with --config on this file\n";
    out << "# subcommand: " << request.subcommand;
    if (!request.scenario.empty()) out << ' ' << request.scenario;
    out << '\n';
    out << "# command line: " << request.command_line << '\n';
    out << "# seed: " << effective.scheme.seed << '\n';
    out << "# threads: " << effective.scheme.threads << '\n';
    out << "# absorption thresholds: eps_n = " << format_number(effective.scheme.eps_n)
        << ", eps_x = " << format_number(effective.scheme.eps_x) << '\n';
    out << "# compiler: " << __VERSION__ << ", C++ " << __cplusplus << '\n';
    for (const auto& note : notes) out << "# " << note << '\n';
    out << "# artifacts:";
    for (const auto& a : artifacts) out << ' ' << a;
    out << "\n\n" << emit_config(effective);
  });
}

RecordMode parse_record_mode(const std::string& mode) {
  if (mode == "events") return RecordMode::kEvents;
  if (mode == "grid") return RecordMode::kGrid;
  return RecordMode::kFinal;
}

SdeOptions sde_options(const RunConfig& c) {
  SdeOptions o;
  o.dt = c.scheme.dt;
  o.t_end = c.scheme.t_end;
  o.eps_n = c.scheme.eps_n;
  o.eps_x = c.scheme.eps_x;
  o.stop_at_fixation = c.experiment.stop_at_fixation;
  o.record_stride = c.experiment.record_every;
  return o;
}

OdeParams ode_params(const DemographicParams& p) {
  if (!p.neutral()) {
    throw ValidationError("the deterministic limit is defined for genotype-independent parameters");
  }
  return {p.beta[0], p.delta[0], p.alpha[0][0]};
}

void run_simulate_exact(const RunRequest& r, ArtifactWriter& writer, std::ostream& log,
                        std::vector<std::string>& notes) {
  const RunConfig& c = r.config;
  ExactOptions options;
  options.record = parse_record_mode(c.experiment.record);
  options.grid_step = c.experiment.grid_step;
  options.scaling = c.experiment.scaling == "logistic" ? RateScaling::kLogistic
                                                       : RateScaling::kSlowFast;
  const auto z0 = GenotypeCounts::from_state(c.experiment.z0, c.experiment.K);
  const Trajectory traj = simulate_exact(z0, c.model, c.scheme.t_end, c.scheme.seed, options);
  if (c.output.wants("csv")) {
    writer.write("simulate-exact.csv", [&](std::ostream& out) { write_trajectory_csv(out, traj); });
  }
  log << "events: " << traj.event_count << ", recorded states: " << traj.size() << '\n';
  if (traj.absorbed_at) {
    log << "absorbed at t = " << format_number(*traj.absorbed_at) << '\n';
    notes.push_back("absorbed at t = " + format_number(*traj.absorbed_at));
  }
}

void run_ode(const RunRequest& r, ArtifactWriter& writer, std::ostream& log) {
  const RunConfig& c = r.config;
  const OdeParams p = ode_params(c.model);
  const GenotypeState z0 = c.experiment.z0;
  const NxyState start = to_nxy(z0);
  if (!start.x) throw ValidationError("the deterministic flow needs a nonzero initial population");
  const OdeSolution solution =
      integrate_ode(z0, p, c.scheme.t_end, c.scheme.dt, c.experiment.record_every);
  if (c.output.wants("csv")) {
    writer.write("ode.csv", [&](std::ostream& out) { write_ode_csv(out, solution); });
    writer.write("ode_closed.csv", [&](std::ostream& out) {
      write_ode_closed_csv(out, solution.times, start.n, *start.x, start.y, p);
    });
  }
  const NxyState end = to_nxy(solution.states.back());
  log << "t = " << format_number(solution.times.back()) << ": numerical n = " << format_number(end.n)
      << ", closed form n = " << format_number(n_closed(solution.times.back(), start.n, p)) << '\n';
}

void run_simulate_sde(const RunRequest& r, ArtifactWriter& writer, std::ostream& log) {
  const RunConfig& c = r.config;
  const SdeKind kind = parse_sde_kind(c.experiment.kind);
  const Vector2 start = initial_state(kind, c.experiment.n0, c.experiment.x0, c.model.gamma);
  const SdePath path = simulate_sde(kind, start, c.model, sde_options(c), c.scheme.seed);
  if (c.output.wants("csv")) {
    writer.write("simulate-sde.csv", [&](std::ostream& out) { write_sde_csv(out, path); });
  }
  log << "absorption: " << to_string(path.absorption.kind);
  if (path.absorption.kind != AbsorptionKind::kNone) {
    log << " at t = " << format_number(path.absorption.time);
  }
  log << '\n';
  if (path.fixation) {
    log << "first fixation: " << to_string(path.fixation->kind) << " at t = "
        << format_number(path.fixation->time) << '\n';
  }
}

void run_checks(const RunRequest& r, ArtifactWriter& writer, std::ostream& log) {
  const RunConfig& c = r.config;
  const DemographicParams& p = c.model;
  const auto sample = sample_interior(c.experiment.samples, c.scheme.seed);
  const DriftCheckReport report = drift_check(p, sample);

  double f_min = std::numeric_limits<double>::infinity();
  double f_min_radius = 0.0;
  for (const auto& s : sample) {
    const double f = f_functional(s, p);
    if (f < f_min) {
      f_min = f;
      f_min_radius = std::sqrt(s.radius_squared());
    }
  }
  std::optional<double> f_closed_gap;
  if (p.neutral()) {
    double worst = 0.0;
    for (const auto& s : sample) {
      worst = std::max(worst, std::abs(f_functional(s, p) - f_neutral_closed(s, p)));
    }
    f_closed_gap = worst;
  }
  std::optional<double> expanded_gap;
  if (p.alpha_symmetric()) {
    double worst = 0.0;
    for (const auto& s : sample) {
      if (s.s1 < 0.0) continue;
      worst = std::max(worst, std::abs(q1_expanded(s, p) - q_drift(s, p)[0]));
    }
    expanded_gap = worst;
  }
  const H1Report h1 = validate_h1(p.alpha);

  auto write = [&](std::ostream& out) {
    write_drift_report(out, report);
    out << "min_F = " << format_number(f_min) << '\n';
    out << "min_F_radius = " << format_number(f_min_radius) << '\n';
    if (f_closed_gap) out << "max_F_closed_form_gap = " << format_number(*f_closed_gap) << '\n';
    if (expanded_gap) out << "max_q1_expanded_gap = " << format_number(*expanded_gap) << '\n';
    out << "h1 = " << h1.describe() << '\n';
  };
  writer.write("checks.txt", write);
  write(log);
}

void run_y_decay(const RunRequest& r, ArtifactWriter& writer, std::ostream& log,
                 std::vector<std::string>& notes) {
  const RunConfig& c = r.config;
  const auto table = y_decay_experiment(c.model, c.experiment.K_list, c.scheme.t_end,
                                        c.experiment.replicates, c.scheme.seed, c.experiment.z0,
                                        c.scheme.threads);
  if (c.output.wants("csv")) {
    writer.write("y-decay.csv", [&](std::ostream& out) { write_moment_table_csv(out, table); });
  }
  write_moment_table_csv(log, table);
  bool positive = std::all_of(table.begin(), table.end(), [](const auto& e) { return e.value > 0.0; });
  if (positive && table.size() >= 2) {
    const double slope = loglog_slope(table);
    log << "log-log slope of E[Y^2] against K: " << format_number(slope) << '\n';
    notes.push_back("log-log slope = " + format_number(slope));
  }
}

void run_particles(const RunRequest& r, const ScenarioPreset* preset, const std::string& stem,
                   ArtifactWriter& writer, std::ostream& log, std::vector<std::string>& notes,
                   RunConfig& effective) {
  const RunConfig& c = r.config;
  FvOptions options;
  DemographicParams params = c.model;
  options.particles = c.experiment.particles;
  options.n0 = c.experiment.n0;
  options.x0 = c.experiment.x0;
  options.t_end = c.scheme.t_end;
  if (preset) {
    params = preset->params;
    options.particles = preset->particles;
    options.n0 = preset->n0;
    options.x0 = preset->x0;
    options.t_end = r.scenario_t_end.value_or(preset->t_end);
    effective.model = params;
    effective.experiment.particles = options.particles;
    effective.experiment.n0 = options.n0;
    effective.experiment.x0 = options.x0;
    effective.scheme.t_end = options.t_end;
  }
  options.dt = c.scheme.dt;
  options.eps_n = c.scheme.eps_n;
  options.eps_x = c.scheme.eps_x;
  options.seed = c.scheme.seed;
  options.threads = c.scheme.threads;
  options.snapshot_times = uniform_snapshot_times(options.t_end, c.experiment.snapshot_every);

  const FvResult result = fv_run(params, options);
  const QsdSnapshot& last = result.snapshots.back();
  if (c.output.wants("csv")) {
    writer.write(stem + "_snapshots.csv",
                 [&](std::ostream& out) { write_snapshots_csv(out, result.snapshots); });
    writer.write(stem + "_summary.csv",
                 [&](std::ostream& out) { write_summary_csv(out, result.snapshots); });
  }
  if (preset && c.output.wants("svg")) {
    writer.write(stem + "_histogram.svg", [&](std::ostream& out) {
      write_histogram_svg(out, last, "Quasi-stationary allele frequency, " + preset->name +
                                         " scenario (k = " + std::to_string(options.particles) +
                                         ")");
    });
  }
  const StationarityReport stationarity = qsd_stationarity_check(result.snapshots, c.experiment.window);
  log << "final t = " << format_number(last.time) << ": m0 = " << format_number(last.m0)
      << ", m1 = " << format_number(last.m1) << ", m_interior = " << format_number(last.m_interior)
      << ", resamplings = " << result.resample_count << '\n';
  if (!stationarity.distances.empty()) {
    log << "stationarity: TV between the last two windows of length "
        << format_number(c.experiment.window) << " = " << format_number(stationarity.final_distance)
        << (stationarity.converged ? " (converged)" : " (not converged)") << '\n';
    notes.push_back("stationarity TV = " + format_number(stationarity.final_distance));
  }
  notes.push_back("final m_interior = " + format_number(last.m_interior));
}

}  // namespace

void run_subcommand(const RunRequest& request, std::ostream& log) {
  const auto& names = subcommand_names();
  if (std::find(names.begin(), names.end(), request.subcommand) == names.end()) {
    throw ValidationError("unknown subcommand '" + request.subcommand + "'");
  }
  request.config.model.validate();
  ArtifactWriter writer(request.config);
  std::vector<std::string> notes;
  RunConfig effective = request.config;

  const std::string& name = request.subcommand;
  if (name == "simulate-exact") {
    run_simulate_exact(request, writer, log, notes);
  } else if (name == "ode") {
    run_ode(request, writer, log);
  } else if (name == "simulate-sde") {
    run_simulate_sde(request, writer, log);
  } else if (name == "checks") {
    run_checks(request, writer, log);
  } else if (name == "y-decay") {
    run_y_decay(request, writer, log, notes);
  } else if (name == "fleming-viot") {
    run_particles(request, nullptr, "fleming-viot", writer, log, notes, effective);
  } else {
    const ScenarioPreset preset = scenario_preset(request.scenario);
    run_particles(request, &preset, "scenario-" + preset.name, writer, log, notes, effective);
  }
  write_meta(writer, request, effective, notes);
}

}  // namespace diploid
