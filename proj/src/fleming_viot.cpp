#include "diploid/fleming_viot.hpp"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "diploid/diffusion.hpp"

namespace diploid {

int histogram_bin(double x) {
  if (x < kBoundaryEdge) return 0;
  if (x >= 1.0 - kBoundaryEdge) return kHistogramBins - 1;
  // Interior bin i covers [(i - 0.5) / 100, (i + 0.5) / 100).
  const int bin = static_cast<int>(std::floor(x * 100.0 + 0.5));
  return std::clamp(bin, 1, kHistogramBins - 2);
}

double bin_left(int bin) { return bin == 0 ? 0.0 : (bin - 0.5) / 100.0; }

double bin_right(int bin) { return bin == kHistogramBins - 1 ? 1.0 : (bin + 0.5) / 100.0; }

ParticleEnsemble::ParticleEnsemble(const DemographicParams& p,
                                   std::vector<SizeFrequency> initial, std::uint64_t seed,
                                   std::vector<std::uint64_t> streams, double eps_n,
                                   double eps_x)
    : params_(p),
      particles_(std::move(initial)),
      resampler_(seed, std::numeric_limits<std::uint64_t>::max()),
      eps_n_(eps_n),
      eps_x_(eps_x) {
  p.validate();
  if (particles_.size() < 2) throw ValidationError("the particle system needs at least 2 particles");
  if (streams.empty()) {
    for (std::size_t i = 0; i < particles_.size(); ++i) streams.push_back(i);
  }
  if (streams.size() != particles_.size()) {
    throw ValidationError("one random stream per particle is required");
  }
  for (const auto& particle : particles_) {
    if (!(particle.n > eps_n_)) {
      throw ValidationError("initial particle sizes must exceed the extinction threshold");
    }
    if (!(particle.x >= 0.0 && particle.x <= 1.0)) {
      throw ValidationError("initial allele frequencies must lie in [0, 1]");
    }
  }
  streams_.reserve(streams.size());
  for (std::uint64_t id : streams) streams_.emplace_back(seed, id);
  alive_.reserve(particles_.size());
}

void ParticleEnsemble::step_range(std::size_t begin, std::size_t end, double dt) {
  for (std::size_t i = begin; i < end; ++i) {
    SizeFrequency& particle = particles_[i];
    if (!(particle.n > eps_n_)) continue;
    RandomStream& rng = streams_[i];
    const double g1 = rng.gaussian();
    // A fixed allele frequency has no noise, so no normal is spent on it.
    const bool fixed = particle.x == 0.0 || particle.x == 1.0;
    const double g2 = fixed ? 0.0 : rng.gaussian();
    particle = step_nx(particle, params_, dt, g1, g2, eps_x_);
  }
}

namespace {

std::size_t pick(const std::vector<std::size_t>& candidates, RandomStream& rng, double time) {
  if (candidates.empty()) {
    throw SimulationError("every particle went extinct in the same step (t = " +
                          std::to_string(time) + "); increase k or reduce dt");
  }
  return candidates[rng.below(candidates.size())];
}

}  // namespace

std::size_t ParticleEnsemble::draw_donor(std::size_t absorbed) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    if (i != absorbed && particles_[i].n > eps_n_) candidates.push_back(i);
  }
  return pick(candidates, resampler_, time_);
}

void ParticleEnsemble::resample_absorbed() {
  alive_.clear();
  bool any_absorbed = false;
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    if (particles_[i].n > eps_n_) {
      alive_.push_back(i);
    } else {
      any_absorbed = true;
    }
  }
  if (!any_absorbed) return;
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    if (particles_[i].n > eps_n_) continue;
    const std::size_t donor = pick(alive_, resampler_, time_);
    // The particle takes over the donor's state but keeps its own stream.
    particles_[i] = particles_[donor];
    log_.push_back({time_, i, donor});
    alive_.push_back(i);
  }
}

void ParticleEnsemble::advance(std::size_t steps, double dt, std::size_t threads) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  threads = std::clamp<std::size_t>(threads, 1, particles_.size());
  if (threads == 1) {
    for (std::size_t s = 0; s < steps; ++s) {
      step_range(0, particles_.size(), dt);
      time_ += dt;
      resample_absorbed();
    }
    return;
  }

  // Workers step disjoint blocks; the barrier completion resamples serially.
  std::exception_ptr failure;
  bool stop = false;
  auto on_step = [&]() noexcept {
    time_ += dt;
    try {
      resample_absorbed();
    } catch (...) {
      failure = std::current_exception();
      stop = true;
    }
  };
  std::barrier sync(static_cast<std::ptrdiff_t>(threads), on_step);
  const std::size_t block = (particles_.size() + threads - 1) / threads;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t begin = std::min(particles_.size(), w * block);
    const std::size_t end = std::min(particles_.size(), begin + block);
    workers.emplace_back([&, begin, end] {
      for (std::size_t s = 0; s < steps; ++s) {
        step_range(begin, end, dt);
        sync.arrive_and_wait();
        if (stop) break;
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

QsdSnapshot ParticleEnsemble::snapshot() const {
  QsdSnapshot snap;
  snap.time = time_;
  std::vector<std::size_t> counts(kHistogramBins, 0);
  for (const auto& particle : particles_) ++counts[histogram_bin(particle.x)];
  const double total = static_cast<double>(particles_.size());
  snap.masses.resize(kHistogramBins);
  for (int b = 0; b < kHistogramBins; ++b) snap.masses[b] = static_cast<double>(counts[b]) / total;
  snap.m0 = snap.masses.front();
  snap.m1 = snap.masses.back();
  const std::size_t interior = particles_.size() - counts.front() - counts.back();
  snap.m_interior = static_cast<double>(interior) / total;
  snap.resample_count = resample_count();
  return snap;
}

void FvOptions::validate() const {
  if (particles < 2) throw ValidationError("the particle system needs at least 2 particles");
  if (!(n0 > eps_n)) throw ValidationError("initial size must exceed the extinction threshold");
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw ValidationError("initial frequency must lie in [0, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be nonnegative");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(eps_n >= 0.0)) throw ValidationError("eps_n must be nonnegative");
  if (!(eps_x >= 0.0 && eps_x < 0.5)) throw ValidationError("eps_x must lie in [0, 0.5)");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
    throw ValidationError("snapshot times must be increasing");
  }
}

std::vector<double> uniform_snapshot_times(double t_end, double every) {
  if (!(every > 0.0)) throw ValidationError("snapshot interval must be positive");
  std::vector<double> times;
  for (std::size_t k = 1;; ++k) {
    const double t = static_cast<double>(k) * every;
    if (t > t_end * (1.0 + 1e-12)) break;
    times.push_back(t);
  }
  return times;
}

FvResult fv_run(const DemographicParams& p, const FvOptions& options) {
  options.validate();
  p.validate();
  const std::vector<SizeFrequency> initial(options.particles, {options.n0, options.x0});
  ParticleEnsemble ensemble(p, initial, options.seed, {}, options.eps_n, options.eps_x);

  const auto steps = static_cast<std::size_t>(std::ceil(options.t_end / options.dt - 1e-9));
  const double h = steps > 0 ? options.t_end / static_cast<double>(steps) : options.dt;
  std::vector<std::size_t> marks{0, steps};
  for (double t : options.snapshot_times) {
    const double index = std::round(t / h);
    marks.push_back(static_cast<std::size_t>(std::clamp(index, 0.0, static_cast<double>(steps))));
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  FvResult result;
  result.steps = steps;
  std::size_t done = 0;
  for (std::size_t mark : marks) {
    ensemble.advance(mark - done, h, options.threads);
    done = mark;
    QsdSnapshot snap = ensemble.snapshot();
    snap.time = mark == steps ? options.t_end : static_cast<double>(mark) * h;
    result.snapshots.push_back(std::move(snap));
  }
  result.resample_count = ensemble.resample_count();
  return result;
}

ScenarioPreset scenario_preset(const std::string& name) {
  ScenarioPreset preset;
  preset.name = name;
  preset.params = DemographicParams::uniform(1.0, 0.0, 0.1, 1.0);
  if (name == "neutral") {
    preset.t_end = 40.0;
  } else if (name == "overdominance") {
    preset.params.beta[1] = 5.0;
    preset.t_end = 100.0;
  } else if (name == "niches") {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) preset.params.alpha[i][j] = i == j ? 0.1 : 0.0;
    }
    preset.t_end = 2500.0;
  } else {
    throw ValidationError("unknown scenario '" + name +
                          "' (expected neutral, overdominance or niches)");
  }
  return preset;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("histograms have different bin counts");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

std::vector<double> window_histogram(const std::vector<QsdSnapshot>& snapshots, double from,
                                     double to) {
  std::vector<double> mean(kHistogramBins, 0.0);
  std::size_t count = 0;
  const double slack = 1e-9 * std::max(1.0, std::abs(to));
  for (const auto& snap : snapshots) {
    if (snap.time < from - slack || snap.time > to + slack) continue;
    for (int b = 0; b < kHistogramBins; ++b) mean[b] += snap.masses[b];
    ++count;
  }
  if (count == 0) throw ValidationError("no snapshot falls in the requested window");
  for (double& m : mean) m /= static_cast<double>(count);
  return mean;
}

StationarityReport qsd_stationarity_check(const std::vector<QsdSnapshot>& snapshots,
                                          double window) {
  if (!(window > 0.0)) throw ValidationError("window must be positive");
  StationarityReport report;
  if (snapshots.empty()) return report;
  const double first = snapshots.front().time;
  const double last = snapshots.back().time;
  const double slack = 1e-9 * std::max(1.0, last);

  // Window j (counted back from the end) covers [last - (j+1) w, last - j w).
  std::vector<std::vector<double>> histograms;
  for (std::size_t j = 0;; ++j) {
    const double end = last - static_cast<double>(j) * window;
    const double start = end - window;
    if (start < first - slack) break;
    std::vector<double> mean(kHistogramBins, 0.0);
    std::size_t count = 0;
    for (const auto& snap : snapshots) {
      const bool inside = snap.time >= start - slack &&
                          (j == 0 ? snap.time <= end + slack : snap.time < end - slack);
      if (!inside) continue;
      for (int b = 0; b < kHistogramBins; ++b) mean[b] += snap.masses[b];
      ++count;
    }
    if (count == 0) break;
    for (double& m : mean) m /= static_cast<double>(count);
    histograms.push_back(std::move(mean));
    report.window_starts.push_back(start);
  }
  std::reverse(histograms.begin(), histograms.end());
  std::reverse(report.window_starts.begin(), report.window_starts.end());
  for (std::size_t i = 1; i < histograms.size(); ++i) {
    report.distances.push_back(total_variation(histograms[i - 1], histograms[i]));
  }
  if (!report.distances.empty()) {
    report.final_distance = report.distances.back();
    report.converged = report.final_distance < kStationarityThreshold;
  }
  return report;
}

}  // namespace diploid
