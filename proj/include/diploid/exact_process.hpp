#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diploid/model.hpp"
#include "diploid/random.hpp"

namespace diploid {

enum class RecordMode {
  /// Every jump, preceded by the initial state at t = 0.
  kEvents,
  /// States on the uniform grid 0, h, 2h, ... plus t_end.
  kGrid,
  /// Initial state and the state at t_end (or at absorption).
  kFinal,
};

struct ExactOptions {
  RecordMode record = RecordMode::kEvents;
  double grid_step = 0.1;
  RateScaling scaling = RateScaling::kSlowFast;
};

/// Time-stamped genotype counts of one exact run.
struct Trajectory {
  std::int64_t K = 1;
  double t_end = 0.0;
  std::vector<double> times;
  std::vector<std::array<std::int64_t, 3>> counts;
  /// Time at which (0,0,0) was hit, if it was hit before t_end.
  std::optional<double> absorbed_at;
  std::uint64_t event_count = 0;

  std::size_t size() const { return times.size(); }
  GenotypeCounts counts_at(std::size_t i) const { return {counts[i], K}; }
  GenotypeState state(std::size_t i) const { return counts_at(i).rescaled(); }
  GenotypeCounts final_counts() const { return counts_at(size() - 1); }
};

enum class JumpKind { kBirth, kDeath };

struct Jump {
  JumpKind kind = JumpKind::kBirth;
  /// Genotype index 0, 1, 2 (AA, Aa, aa).
  int genotype = 0;
  double waiting_time = 0.0;
};

/// Draws the next jump of the chain from `z`: exponential waiting time with
/// the total rate, event chosen proportionally to its rate. Empty at
/// extinction.
std::optional<Jump> sample_jump(const GenotypeCounts& z, const DemographicParams& p,
                                RandomStream& rng, RateScaling scaling = RateScaling::kSlowFast);

/// Next-event simulation of Z^K on [0, t_end].
Trajectory simulate_exact(const GenotypeCounts& z0, const DemographicParams& p, double t_end,
                          std::uint64_t seed, const ExactOptions& options = {});
/// Same, starting from the lattice point K*z0 (which must be integral).
Trajectory simulate_exact(const GenotypeState& z0, const DemographicParams& p, std::int64_t K,
                          double t_end, std::uint64_t seed, const ExactOptions& options = {});

/// Independent replicates; replicate i uses the stream (seed, i).
std::vector<Trajectory> simulate_replicates(const GenotypeCounts& z0, const DemographicParams& p,
                                            double t_end, std::size_t replicates,
                                            std::uint64_t seed, const ExactOptions& options,
                                            std::size_t threads = 1);

struct MomentEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t replicates = 0;
  double time_point = 0.0;
  int moment_order = 1;
  std::int64_t K = 1;
};

/// Monte-Carlo estimate of E[(Y^K_t)^2] for each K, started from the lattice
/// point nearest to K*z0.
std::vector<MomentEstimate> y_decay_experiment(const DemographicParams& p,
                                               const std::vector<std::int64_t>& K_list, double t,
                                               std::size_t replicates, std::uint64_t seed,
                                               const GenotypeState& z0 = {1.0, 2.0, 1.0},
                                               std::size_t threads = 1);

using WarningSink = std::function<void(const std::string&)>;

/// Monte-Carlo estimate of E[(N^K_t)^order]. A failed H1 check is reported
/// through `warn` (stderr by default) but does not stop the experiment.
MomentEstimate moment_experiment(const DemographicParams& p, const GenotypeState& z0,
                                 std::int64_t K, double t, int order, std::size_t replicates,
                                 std::uint64_t seed, std::size_t threads = 1,
                                 const WarningSink& warn = {});

/// Least-squares slope of log(value) against log(K).
double loglog_slope(const std::vector<MomentEstimate>& estimates);

}  // namespace diploid
