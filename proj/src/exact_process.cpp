#include "diploid/exact_process.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "diploid/parallel.hpp"
#include "diploid/stats.hpp"

namespace diploid {

namespace {

// Births of types 0..2 followed by deaths of types 0..2.
struct RateTable {
  std::array<double, 6> rate{};
  double total = 0.0;
};

RateTable jump_rates(const std::array<std::int64_t, 3>& c, const DemographicParams& p,
                     std::int64_t K, RateScaling scaling) {
  RateTable table;
  const double c1 = static_cast<double>(c[0]);
  const double c2 = static_cast<double>(c[1]);
  const double c3 = static_cast<double>(c[2]);
  const double total = c1 + c2 + c3;
  if (total == 0.0) return table;
  const double k = static_cast<double>(K);
  const double fast = scaling == RateScaling::kSlowFast ? p.gamma * k : 0.0;

  // Allele counts A and a divided by two: pairs of gametes drawn at random.
  const double big = c1 + 0.5 * c2;
  const double small = c3 + 0.5 * c2;
  table.rate[0] = (fast + p.beta[0]) * big * big / total;
  table.rate[1] = (fast + p.beta[1]) * 2.0 * big * small / total;
  table.rate[2] = (fast + p.beta[2]) * small * small / total;

  const double cs[3] = {c1, c2, c3};
  for (int i = 0; i < 3; ++i) {
    if (cs[i] == 0.0) continue;
    double per_capita = fast + p.delta[i];
    for (int j = 0; j < 3; ++j) per_capita += p.alpha[j][i] * cs[j] / k;
    table.rate[3 + i] = cs[i] * std::max(per_capita, 0.0);
  }
  for (double r : table.rate) table.total += r;
  return table;
}

int choose_event(const RateTable& table, double u) {
  double target = u * table.total;
  int last_positive = -1;
  for (int e = 0; e < 6; ++e) {
    if (table.rate[e] <= 0.0) continue;
    last_positive = e;
    if (target < table.rate[e]) return e;
    target -= table.rate[e];
  }
  // Rounding pushed the target past the last bucket.
  return last_positive;
}

std::vector<double> grid_times(double t_end, double step) {
  std::vector<double> grid{0.0};
  if (t_end <= 0.0) return grid;
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) {
    grid.push_back(std::min(static_cast<double>(k) * step, t_end));
  }
  if (grid.back() < t_end) grid.push_back(t_end);
  return grid;
}

}  // namespace

std::optional<Jump> sample_jump(const GenotypeCounts& z, const DemographicParams& p,
                                RandomStream& rng, RateScaling scaling) {
  z.validate();
  const RateTable table = jump_rates(z.counts, p, z.K, scaling);
  if (table.total <= 0.0) return std::nullopt;
  Jump jump;
  jump.waiting_time = rng.exponential() / table.total;
  const int e = choose_event(table, rng.uniform());
  jump.kind = e < 3 ? JumpKind::kBirth : JumpKind::kDeath;
  jump.genotype = e % 3;
  return jump;
}

namespace {

Trajectory run_exact(const GenotypeCounts& z0, const DemographicParams& p, double t_end,
                     RandomStream& rng, const ExactOptions& options) {
  z0.validate();
  p.validate();
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw ValidationError("t_end must be nonnegative and finite");
  }
  if (options.record == RecordMode::kGrid && !(options.grid_step > 0.0)) {
    throw ValidationError("grid step must be positive");
  }

  Trajectory traj;
  traj.K = z0.K;
  traj.t_end = t_end;
  auto counts = z0.counts;

  std::vector<double> grid;
  std::size_t next_grid = 0;
  if (options.record == RecordMode::kGrid) grid = grid_times(t_end, options.grid_step);

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.counts.push_back(counts);
  };
  // Record every grid point strictly before `until` (and not after t_end).
  auto flush_grid = [&](double until) {
    while (next_grid < grid.size() && grid[next_grid] < until) record(grid[next_grid++]);
  };

  if (options.record != RecordMode::kGrid) record(0.0);

  double t = 0.0;
  bool extinct = z0.extinct();
  if (extinct) traj.absorbed_at = 0.0;

  while (!extinct) {
    const RateTable table = jump_rates(counts, p, z0.K, options.scaling);
    const double t_next = t + rng.exponential() / table.total;
    const double u = rng.uniform();
    if (t_next > t_end) break;
    if (options.record == RecordMode::kGrid) flush_grid(t_next);

    const int e = choose_event(table, u);
    counts[e % 3] += e < 3 ? 1 : -1;
    t = t_next;
    ++traj.event_count;
    if (options.record == RecordMode::kEvents) record(t);
    if (counts[0] + counts[1] + counts[2] == 0) {
      extinct = true;
      traj.absorbed_at = t;
    }
  }

  switch (options.record) {
    case RecordMode::kGrid:
      flush_grid(std::numeric_limits<double>::infinity());
      break;
    case RecordMode::kFinal: {
      const double t_last = traj.absorbed_at ? *traj.absorbed_at : t_end;
      if (t_last > traj.times.back()) record(t_last);
      break;
    }
    case RecordMode::kEvents:
      break;
  }
  return traj;
}

}  // namespace

Trajectory simulate_exact(const GenotypeCounts& z0, const DemographicParams& p, double t_end,
                          std::uint64_t seed, const ExactOptions& options) {
  RandomStream rng(seed, 0);
  return run_exact(z0, p, t_end, rng, options);
}

Trajectory simulate_exact(const GenotypeState& z0, const DemographicParams& p, std::int64_t K,
                          double t_end, std::uint64_t seed, const ExactOptions& options) {
  return simulate_exact(GenotypeCounts::from_state(z0, K), p, t_end, seed, options);
}

std::vector<Trajectory> simulate_replicates(const GenotypeCounts& z0, const DemographicParams& p,
                                            double t_end, std::size_t replicates,
                                            std::uint64_t seed, const ExactOptions& options,
                                            std::size_t threads) {
  z0.validate();
  p.validate();
  std::vector<Trajectory> out(replicates);
  parallel_for(replicates, threads, [&](std::size_t i) {
    RandomStream rng(seed, i);
    out[i] = run_exact(z0, p, t_end, rng, options);
  });
  return out;
}

namespace {

MomentEstimate summarize(const std::vector<double>& samples, double t, int order,
                         std::int64_t K) {
  RunningStats stats;
  for (double s : samples) stats.add(s);
  return {stats.mean(), stats.standard_error(), stats.count(), t, order, K};
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index) {
  return seed + 0xD1B54A32D192ED03ULL * (index + 1);
}

}  // namespace

std::vector<MomentEstimate> y_decay_experiment(const DemographicParams& p,
                                               const std::vector<std::int64_t>& K_list, double t,
                                               std::size_t replicates, std::uint64_t seed,
                                               const GenotypeState& z0, std::size_t threads) {
  p.validate();
  if (!(t >= 0.0)) throw ValidationError("time point must be nonnegative");
  if (replicates < 2) throw ValidationError("at least two replicates are required");
  if (K_list.empty()) throw ValidationError("K list is empty");
  for (std::size_t i = 0; i < K_list.size(); ++i) {
    if (K_list[i] <= 0) throw ValidationError("every K must be a positive integer");
    if (i > 0 && K_list[i] <= K_list[i - 1]) throw ValidationError("K list must be increasing");
  }

  std::vector<MomentEstimate> table;
  for (std::size_t k = 0; k < K_list.size(); ++k) {
    const auto start = GenotypeCounts::nearest(z0, K_list[k]);
    const auto runs = simulate_replicates(start, p, t, replicates, derived_seed(seed, k),
                                          {RecordMode::kFinal, 0.1, RateScaling::kSlowFast},
                                          threads);
    std::vector<double> samples;
    samples.reserve(runs.size());
    for (const auto& run : runs) {
      const double y = hardy_weinberg_deviation(run.final_counts());
      samples.push_back(y * y);
    }
    table.push_back(summarize(samples, t, 2, K_list[k]));
  }
  return table;
}

MomentEstimate moment_experiment(const DemographicParams& p, const GenotypeState& z0,
                                 std::int64_t K, double t, int order, std::size_t replicates,
                                 std::uint64_t seed, std::size_t threads,
                                 const WarningSink& warn) {
  p.validate();
  if (order < 1) throw ValidationError("moment order must be at least 1");
  if (replicates < 2) throw ValidationError("at least two replicates are required");
  const H1Report h1 = validate_h1(p.alpha);
  if (!h1.satisfied) {
    const std::string message = "warning: moment bounds not guaranteed: " + h1.describe();
    if (warn) {
      warn(message);
    } else {
      std::cerr << message << '\n';
    }
  }
  const auto start = GenotypeCounts::nearest(z0, K);
  const auto runs = simulate_replicates(start, p, t, replicates, seed,
                                        {RecordMode::kFinal, 0.1, RateScaling::kSlowFast}, threads);
  std::vector<double> samples;
  samples.reserve(runs.size());
  for (const auto& run : runs) {
    samples.push_back(std::pow(run.final_counts().rescaled().n(), order));
  }
  return summarize(samples, t, order, K);
}

double loglog_slope(const std::vector<MomentEstimate>& estimates) {
  if (estimates.size() < 2) throw ValidationError("slope needs at least two estimates");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& e : estimates) {
    if (!(e.value > 0.0)) throw ValidationError("log-log slope needs positive estimates");
    const double lx = std::log(static_cast<double>(e.K));
    const double ly = std::log(e.value);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(estimates.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace diploid
