#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diploid/model.hpp"
#include "diploid/random.hpp"

namespace diploid {

/// 101 bins on [0, 1]: half-width bins [0, 0.005) and [0.995, 1] at the ends
/// and width-0.01 bins centred on 0.01, ..., 0.99 in between.
inline constexpr int kHistogramBins = 101;
/// Width of the end bins; also the threshold of the boundary masses m0, m1.
inline constexpr double kBoundaryEdge = 0.005;

int histogram_bin(double x);
double bin_left(int bin);
double bin_right(int bin);

struct QsdSnapshot {
  double time = 0.0;
  /// Fraction of particles per histogram bin; sums to 1.
  std::vector<double> masses;
  /// Fraction with x < kBoundaryEdge.
  double m0 = 0.0;
  /// Fraction with x >= 1 - kBoundaryEdge.
  double m1 = 0.0;
  double m_interior = 0.0;
  std::uint64_t resample_count = 0;
};

struct ResampleEvent {
  double time = 0.0;
  std::size_t absorbed = 0;
  std::size_t donor = 0;
};

/// k copies of the (n, x) diffusion. A particle whose size drops to eps_n or
/// below is moved onto a uniformly chosen surviving particle. Fixation of x
/// does not trigger resampling.
class ParticleEnsemble {
 public:
  /// Particle i draws its noise from the stream (seed, streams[i]); by default
  /// streams[i] = i. Resampling uses a separate stream.
  ParticleEnsemble(const DemographicParams& p, std::vector<SizeFrequency> initial,
                   std::uint64_t seed, std::vector<std::uint64_t> streams = {},
                   double eps_n = 1e-4, double eps_x = 1e-4);

  /// Advances every particle by `steps` Euler steps of size dt, resampling
  /// absorbed particles after each step in ascending index order.
  /// Results do not depend on `threads`.
  void advance(std::size_t steps, double dt, std::size_t threads = 1);

  /// Uniform draw among the particles other than `absorbed` that are above
  /// the extinction threshold. Throws SimulationError if there are none.
  std::size_t draw_donor(std::size_t absorbed);

  QsdSnapshot snapshot() const;

  std::size_t size() const { return particles_.size(); }
  double time() const { return time_; }
  std::uint64_t resample_count() const { return log_.size(); }
  const std::vector<SizeFrequency>& particles() const { return particles_; }
  const std::vector<ResampleEvent>& resample_log() const { return log_; }

 private:
  void step_range(std::size_t begin, std::size_t end, double dt);
  void resample_absorbed();

  DemographicParams params_;
  std::vector<SizeFrequency> particles_;
  std::vector<RandomStream> streams_;
  RandomStream resampler_;
  double eps_n_;
  double eps_x_;
  double time_ = 0.0;
  std::vector<ResampleEvent> log_;
  std::vector<std::size_t> alive_;
};

struct FvOptions {
  std::size_t particles = 2000;
  double n0 = 10.0;
  double x0 = 0.5;
  double t_end = 40.0;
  double dt = 1e-3;
  double eps_n = 1e-4;
  double eps_x = 1e-4;
  /// Snapshot times in increasing order; the initial and final states are
  /// always captured.
  std::vector<double> snapshot_times;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  void validate() const;
};

/// Times every, 2 every, ... up to t_end.
std::vector<double> uniform_snapshot_times(double t_end, double every);

struct FvResult {
  std::vector<QsdSnapshot> snapshots;
  std::uint64_t resample_count = 0;
  std::size_t steps = 0;
};

FvResult fv_run(const DemographicParams& p, const FvOptions& options);

struct ScenarioPreset {
  std::string name;
  DemographicParams params;
  std::size_t particles = 2000;
  double n0 = 10.0;
  double x0 = 0.5;
  double t_end = 0.0;
};

/// Parameters of the neutral, overdominance and separate-niches scenarios.
ScenarioPreset scenario_preset(const std::string& name);

/// 0.5 * sum |a_i - b_i|.
double total_variation(const std::vector<double>& a, const std::vector<double>& b);

/// Mean histogram of the snapshots with time in [from, to].
std::vector<double> window_histogram(const std::vector<QsdSnapshot>& snapshots, double from,
                                     double to);

struct StationarityReport {
  /// Start times of consecutive windows ending at the last snapshot.
  std::vector<double> window_starts;
  /// TV distance between window i and window i + 1.
  std::vector<double> distances;
  double final_distance = 0.0;
  bool converged = false;
};

inline constexpr double kStationarityThreshold = 0.05;

/// Splits the run into consecutive windows of length `window` counted back
/// from the last snapshot and compares their mean histograms.
StationarityReport qsd_stationarity_check(const std::vector<QsdSnapshot>& snapshots,
                                          double window);

}  // namespace diploid
