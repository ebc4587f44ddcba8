#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diploid/fleming_viot.hpp"

using namespace diploid;

namespace {

const DemographicParams kNeutral = DemographicParams::uniform(1.0, 0.0, 0.1, 1.0);

QsdSnapshot uniform_snapshot(double time, int bin) {
  QsdSnapshot s;
  s.time = time;
  s.masses.assign(kHistogramBins, 0.0);
  s.masses[bin] = 1.0;
  return s;
}

}  // namespace

TEST_CASE("histogram bins") {
  CHECK(histogram_bin(0.0) == 0);
  CHECK(histogram_bin(0.0049) == 0);
  CHECK(histogram_bin(0.005) == 1);
  CHECK(histogram_bin(0.0149) == 1);
  CHECK(histogram_bin(0.015) == 2);
  CHECK(histogram_bin(0.5) == 50);
  CHECK(histogram_bin(0.9949) == 99);
  CHECK(histogram_bin(0.995) == 100);
  CHECK(histogram_bin(1.0) == 100);
  CHECK(bin_left(0) == 0.0);
  CHECK(bin_right(0) == doctest::Approx(0.005));
  CHECK(bin_left(100) == doctest::Approx(0.995));
  CHECK(bin_right(100) == 1.0);
  for (int b = 0; b + 1 < kHistogramBins; ++b) CHECK(bin_right(b) == doctest::Approx(bin_left(b + 1)));
}

TEST_CASE("donor choice is uniform over the other particles") {
  const std::vector<SizeFrequency> initial(5, {10.0, 0.5});
  ParticleEnsemble ensemble(kNeutral, initial, 3);
  std::vector<int> counts(5, 0);
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) ++counts[ensemble.draw_donor(2)];
  CHECK(counts[2] == 0);
  double chi2 = 0.0;
  const double expected = draws / 4.0;
  for (int i : {0, 1, 3, 4}) chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  // 99.9% quantile of chi-square with 3 degrees of freedom.
  CHECK(chi2 < 16.27);
}

TEST_CASE("resampling keeps k particles above the threshold") {
  // Small populations go extinct often, so resampling happens many times.
  const std::vector<SizeFrequency> initial(50, {0.5, 0.4});
  ParticleEnsemble ensemble(kNeutral, initial, 5);
  for (int block = 0; block < 20; ++block) {
    ensemble.advance(100, 1e-3);
    CHECK(ensemble.size() == 50);
    for (const auto& particle : ensemble.particles()) {
      CHECK(particle.n > 1e-4);
      CHECK(particle.x >= 0.0);
      CHECK(particle.x <= 1.0);
    }
    const QsdSnapshot snap = ensemble.snapshot();
    CHECK(std::accumulate(snap.masses.begin(), snap.masses.end(), 0.0) == doctest::Approx(1.0));
    CHECK(snap.m0 + snap.m1 + snap.m_interior == doctest::Approx(1.0));
  }
  CHECK(ensemble.resample_count() > 0);
  for (const auto& event : ensemble.resample_log()) CHECK(event.absorbed != event.donor);
  CHECK(ensemble.time() == doctest::Approx(2.0));
}

TEST_CASE("results do not depend on the thread count") {
  const std::vector<SizeFrequency> initial(64, {0.3, 0.5});
  ParticleEnsemble serial(kNeutral, initial, 9);
  ParticleEnsemble parallel(kNeutral, initial, 9);
  serial.advance(2000, 1e-3, 1);
  parallel.advance(2000, 1e-3, 4);
  REQUIRE(serial.resample_count() > 0);
  CHECK(serial.resample_count() == parallel.resample_count());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial.particles()[i].n == parallel.particles()[i].n);
    CHECK(serial.particles()[i].x == parallel.particles()[i].x);
  }
}

TEST_CASE("permuting particles and their streams permutes the trajectories") {
  std::vector<SizeFrequency> initial;
  std::vector<std::uint64_t> streams;
  for (int i = 0; i < 8; ++i) {
    initial.push_back({8.0 + i, 0.1 * (i + 1)});
    streams.push_back(i);
  }
  const std::vector<std::size_t> perm{3, 7, 0, 5, 1, 6, 2, 4};
  std::vector<SizeFrequency> permuted_initial;
  std::vector<std::uint64_t> permuted_streams;
  for (std::size_t i : perm) {
    permuted_initial.push_back(initial[i]);
    permuted_streams.push_back(streams[i]);
  }
  ParticleEnsemble a(kNeutral, initial, 21, streams);
  ParticleEnsemble b(kNeutral, permuted_initial, 21, permuted_streams);
  a.advance(1000, 1e-3);
  b.advance(1000, 1e-3);
  REQUIRE(a.resample_count() == 0);
  REQUIRE(b.resample_count() == 0);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    CHECK(b.particles()[k].n == a.particles()[perm[k]].n);
    CHECK(b.particles()[k].x == a.particles()[perm[k]].x);
  }
}

TEST_CASE("fixed particles keep evolving in size without resampling") {
  const std::vector<SizeFrequency> initial(4, {10.0, 1.0});
  ParticleEnsemble ensemble(kNeutral, initial, 2);
  ensemble.advance(500, 1e-3);
  for (const auto& particle : ensemble.particles()) {
    CHECK(particle.x == 1.0);
    CHECK(particle.n != 10.0);
  }
  CHECK(ensemble.snapshot().m1 == 1.0);
}

TEST_CASE("simultaneous extinction of every particle aborts") {
  const auto p = DemographicParams::uniform(0.0, 100.0, 0.0, 1.0);
  const std::vector<SizeFrequency> initial(2, {5.001, 0.5});
  ParticleEnsemble ensemble(p, initial, 1, {}, 5.0, 1e-4);
  CHECK_THROWS_AS(ensemble.advance(1, 0.1), SimulationError);
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(ParticleEnsemble(kNeutral, {{1.0, 0.5}}, 1), ValidationError);
  CHECK_THROWS_AS(ParticleEnsemble(kNeutral, {{1.0, 0.5}, {0.0, 0.5}}, 1), ValidationError);
  CHECK_THROWS_AS(ParticleEnsemble(kNeutral, {{1.0, 0.5}, {1.0, 1.5}}, 1), ValidationError);
  CHECK_THROWS_AS(ParticleEnsemble(kNeutral, {{1.0, 0.5}, {1.0, 0.5}}, 1, {0}), ValidationError);
}

TEST_CASE("fv_run snapshots") {
  FvOptions opts;
  opts.particles = 100;
  opts.t_end = 2.0;
  opts.snapshot_times = uniform_snapshot_times(2.0, 0.5);
  const FvResult r = fv_run(kNeutral, opts);
  REQUIRE(r.snapshots.size() == 5);
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    CHECK(r.snapshots[i].time == doctest::Approx(0.5 * i));
    const auto& m = r.snapshots[i].masses;
    CHECK(std::accumulate(m.begin(), m.end(), 0.0) == doctest::Approx(1.0));
  }
  CHECK(r.snapshots.front().masses[50] == 1.0);
  CHECK(r.steps == 2000);

  const FvResult again = fv_run(kNeutral, opts);
  CHECK(again.snapshots.back().masses == r.snapshots.back().masses);
  opts.threads = 3;
  const FvResult threaded = fv_run(kNeutral, opts);
  CHECK(threaded.snapshots.back().masses == r.snapshots.back().masses);
}

TEST_CASE("fv option validation") {
  FvOptions opts;
  opts.particles = 1;
  CHECK_THROWS_AS(fv_run(kNeutral, opts), ValidationError);
  opts = {};
  opts.dt = 0.0;
  CHECK_THROWS_AS(fv_run(kNeutral, opts), ValidationError);
  opts = {};
  opts.snapshot_times = {2.0, 1.0};
  CHECK_THROWS_AS(fv_run(kNeutral, opts), ValidationError);
  CHECK_THROWS_AS(uniform_snapshot_times(1.0, 0.0), ValidationError);
}

TEST_CASE("scenario presets") {
  const auto neutral = scenario_preset("neutral");
  CHECK(neutral.params == DemographicParams::uniform(1.0, 0.0, 0.1, 1.0));
  CHECK(neutral.t_end == 40.0);
  CHECK(neutral.particles == 2000);
  CHECK(neutral.n0 == 10.0);
  CHECK(neutral.x0 == 0.5);

  const auto over = scenario_preset("overdominance");
  CHECK(over.params.beta == Vector3{1.0, 5.0, 1.0});
  CHECK(over.t_end == 100.0);

  const auto niches = scenario_preset("niches");
  CHECK(niches.t_end == 2500.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(niches.params.alpha[i][j] == (i == j ? 0.1 : 0.0));

  CHECK_THROWS_AS(scenario_preset("mutualism"), ValidationError);
}

TEST_CASE("total variation and windowed histograms") {
  const auto a = uniform_snapshot(0.0, 0);
  const auto b = uniform_snapshot(1.0, 100);
  CHECK(total_variation(a.masses, a.masses) == 0.0);
  CHECK(total_variation(a.masses, b.masses) == 1.0);
  const auto mean = window_histogram({a, b}, 0.0, 1.0);
  CHECK(mean[0] == 0.5);
  CHECK(mean[100] == 0.5);
  CHECK_THROWS_AS(window_histogram({a, b}, 3.0, 4.0), ValidationError);
  CHECK_THROWS_AS(total_variation({1.0}, {0.5, 0.5}), ValidationError);
}

TEST_CASE("stationarity check") {
  SUBCASE("identical snapshots give distance zero") {
    std::vector<QsdSnapshot> snaps;
    for (int t = 0; t <= 10; ++t) snaps.push_back(uniform_snapshot(t, 40));
    const auto r = qsd_stationarity_check(snaps, 5.0);
    REQUIRE(r.distances.size() == 1);
    CHECK(r.final_distance == 0.0);
    CHECK(r.converged);
    CHECK(r.window_starts == std::vector<double>{0.0, 5.0});
  }
  SUBCASE("a moving law is not stationary") {
    std::vector<QsdSnapshot> snaps;
    for (int t = 0; t <= 10; ++t) snaps.push_back(uniform_snapshot(t, t < 5 ? 10 : 90));
    const auto r = qsd_stationarity_check(snaps, 5.0);
    CHECK(r.final_distance == 1.0);
    CHECK_FALSE(r.converged);
  }
  CHECK_THROWS_AS(qsd_stationarity_check({}, 0.0), ValidationError);
}
