#include <doctest.h>

#include <cmath>

#include "diploid/diffusion.hpp"
#include "diploid/random.hpp"
#include "diploid/stats.hpp"

using namespace diploid;

namespace {

const DemographicParams kNeutral = DemographicParams::uniform(1.0, 0.0, 0.1, 1.0);

DemographicParams random_symmetric(RandomStream& rng) {
  DemographicParams p;
  for (int i = 0; i < 3; ++i) {
    p.beta[i] = 0.5 + 2.0 * rng.uniform();
    p.delta[i] = rng.uniform();
    for (int j = i; j < 3; ++j) p.alpha[i][j] = p.alpha[j][i] = 0.05 + 0.3 * rng.uniform();
  }
  p.gamma = 0.5 + rng.uniform();
  return p;
}

}  // namespace

TEST_CASE("allele-count coefficients at a hand-evaluated point") {
  const Vector2 drift = drift_na(1.0, 1.0, kNeutral);
  CHECK(drift[0] == doctest::Approx(0.9));
  CHECK(drift[1] == doctest::Approx(0.9));
  const Matrix2 sigma = diffusion_na(1.0, 1.0, 1.0);
  CHECK(sigma[0][0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(sigma[1][0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(sigma[0][1] == doctest::Approx(1.0));
  CHECK(sigma[1][1] == doctest::Approx(-1.0));
}

TEST_CASE("allele-count coefficients on the boundary") {
  const Matrix2 sigma = diffusion_na(3.0, 0.0, 1.0);
  CHECK(sigma[0][1] == 0.0);
  CHECK(sigma[1][1] == 0.0);
  const Vector2 drift = drift_na(3.0, 0.0, kNeutral);
  // A single-allele population grows logistically at rate beta - delta - alpha * n, n = 3 / 2.
  CHECK(drift[0] == doctest::Approx((1.0 - 0.1 * 1.5) * 3.0));
  CHECK(drift[1] == 0.0);
  CHECK(drift_na(0.0, 0.0, kNeutral) == Vector2{0.0, 0.0});
  CHECK(diffusion_na(0.0, 0.0, 1.0) == Matrix2{});
  CHECK_THROWS_AS(drift_na(-1.0, 1.0, kNeutral), ValidationError);
  CHECK_THROWS_AS(diffusion_na(1.0, -1.0, 1.0), ValidationError);
}

TEST_CASE("allele-count noise is bounded by the square root of the size") {
  RandomStream rng(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const double a = 1e-3 * rng.uniform();
    const double b = 1e-3 * rng.uniform();
    const Matrix2 s = diffusion_na(a, b, 1.0);
    for (const auto& row : s)
      for (double v : row) CHECK(std::abs(v) <= 2.0 * std::sqrt(a + b) + 1e-15);
  }
}

TEST_CASE("size-frequency coefficients") {
  RandomStream rng(6, 0);
  for (int i = 0; i < 100; ++i) {
    const double n = 0.1 + 20 * rng.uniform();
    const double x = rng.uniform();
    CHECK(drift_nx(n, x, kNeutral)[1] == doctest::Approx(0.0));
    CHECK(drift_nx(n, x, kNeutral)[0] == doctest::Approx((1.0 - 0.1 * n) * n));
  }
  CHECK(diffusion_nx(5.0, 0.0, 1.0)[1] == 0.0);
  CHECK(diffusion_nx(5.0, 1.0, 1.0)[1] == 0.0);
  CHECK(diffusion_nx(5.0, 0.5, 2.0)[0] == doctest::Approx(std::sqrt(20.0)));
  CHECK(diffusion_nx(5.0, 0.5, 2.0)[1] == doctest::Approx(std::sqrt(0.1)));
  CHECK_THROWS_AS(drift_nx(0.0, 0.5, kNeutral), ValidationError);
  CHECK_THROWS_AS(diffusion_nx(-1.0, 0.5, 1.0), ValidationError);
  CHECK_THROWS_AS(drift_nx_haploid(1.0, 0.5, random_symmetric(rng)), ValidationError);
}

TEST_CASE("size-frequency coefficients are the Ito image of the allele-count coefficients") {
  RandomStream rng(8, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const DemographicParams p = random_symmetric(rng);
    const double a = 0.05 + 10 * rng.uniform();
    const double b = 0.05 + 10 * rng.uniform();
    const double s = a + b;
    const double n = s / 2.0;
    const double x = a / s;

    // (n, x) = ((a + b) / 2, a / (a + b)): gradients and Hessian of x.
    const Vector2 grad_n{0.5, 0.5};
    const Vector2 grad_x{b / (s * s), -a / (s * s)};
    const double hxx[2][2] = {{-2.0 * b / (s * s * s), (a - b) / (s * s * s)},
                              {(a - b) / (s * s * s), 2.0 * a / (s * s * s)}};

    const Vector2 mu = drift_na(a, b, p);
    const Matrix2 sigma = diffusion_na(a, b, p.gamma);
    double cov[2][2] = {};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) cov[i][j] += sigma[i][k] * sigma[j][k];

    double ito_x = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) ito_x += 0.5 * hxx[i][j] * cov[i][j];
    const double drift_n = grad_n[0] * mu[0] + grad_n[1] * mu[1];
    const double drift_x = grad_x[0] * mu[0] + grad_x[1] * mu[1] + ito_x;

    auto quad = [&](const Vector2& u, const Vector2& v) {
      double q = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q += u[i] * cov[i][j] * v[j];
      return q;
    };

    const Vector2 direct = drift_nx(n, x, p);
    const Vector2 noise = diffusion_nx(n, x, p.gamma);
    const double scale = 1.0 + std::abs(direct[0]);
    CHECK(std::abs(drift_n - direct[0]) < 1e-8 * scale);
    CHECK(std::abs(drift_x - direct[1]) < 1e-8);
    CHECK(std::abs(quad(grad_n, grad_n) - noise[0] * noise[0]) < 1e-8 * (1.0 + n));
    CHECK(std::abs(quad(grad_x, grad_x) - noise[1] * noise[1]) < 1e-8);
    CHECK(std::abs(quad(grad_n, grad_x)) < 1e-8);
  }
}

TEST_CASE("one-step statistics agree between allele-count and size-frequency schemes") {
  const auto p = DemographicParams::uniform(1.0, 0.0, 0.1, 1.0);
  const double n = 10.0, x = 0.3, dt = 1e-3;
  SdeOptions opts;
  opts.dt = dt;
  opts.t_end = dt;
  opts.eps_x = 0.0;
  RunningStats dn_na, dx_na, dn_nx, dx_nx;
  const Vector2 start_na = initial_state(SdeKind::kAlleleCounts, n, x, 1.0);
  for (std::uint64_t i = 0; i < 40000; ++i) {
    const SdePath a = simulate_sde(SdeKind::kAlleleCounts, start_na, p, opts, 12, i);
    const SizeFrequency end_a = to_size_frequency(SdeKind::kAlleleCounts, a.states.back(), 1.0);
    dn_na.add(end_a.n - n);
    dx_na.add(end_a.x - x);
    const SdePath b = simulate_sde(SdeKind::kSizeFrequency, {n, x}, p, opts, 13, i);
    dn_nx.add(b.states.back()[0] - n);
    dx_nx.add(b.states.back()[1] - x);
  }
  // Variances per unit time match 2 gamma n and gamma x (1 - x) / n up to O(dt).
  CHECK(dn_na.variance() / dt == doctest::Approx(2.0 * n).epsilon(0.03));
  CHECK(dn_nx.variance() / dt == doctest::Approx(2.0 * n).epsilon(0.03));
  CHECK(dx_na.variance() / dt == doctest::Approx(x * (1 - x) / n).epsilon(0.03));
  CHECK(dx_nx.variance() / dt == doctest::Approx(x * (1 - x) / n).epsilon(0.03));
  CHECK(std::abs(dx_na.mean() - dx_nx.mean()) < 4 * std::hypot(dx_na.standard_error(), dx_nx.standard_error()));
  CHECK(std::abs(dn_na.mean() - dn_nx.mean()) < 4 * std::hypot(dn_na.standard_error(), dn_nx.standard_error()));
}

TEST_CASE("simulated paths respect their domains and freeze after absorption") {
  SdeOptions opts;
  opts.t_end = 30.0;
  opts.record_stride = 10;
  for (SdeKind kind : {SdeKind::kAlleleCounts, SdeKind::kSizeFrequency, SdeKind::kHaploid}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const SdePath path = simulate_sde(kind, initial_state(kind, 2.0, 0.4, 1.0), kNeutral, opts, seed);
      for (const auto& st : path.states) {
        CHECK(st[0] >= 0.0);
        CHECK(st[1] >= 0.0);
        if (kind != SdeKind::kAlleleCounts) CHECK(st[1] <= 1.0);
      }
      if (path.absorption.kind == AbsorptionKind::kExtinction) {
        CHECK(path.times.back() == path.absorption.time);
      }
      for (std::size_t i = 1; i < path.times.size(); ++i) CHECK(path.times[i] > path.times[i - 1]);
    }
  }
}

TEST_CASE("Kolmogorov paths stay in the domain and stop at fixation") {
  SdeOptions opts;
  opts.t_end = 20.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SdePath path = simulate_sde(SdeKind::kKolmogorov, initial_state(SdeKind::kKolmogorov, 5.0, 0.5, 1.0),
                                      kNeutral, opts, seed);
    for (const auto& st : path.states) CHECK(in_domain(SState{st[0], st[1]}, 1e-9));
    if (path.fixation) CHECK(path.absorption.kind == path.fixation->kind);
  }
}

TEST_CASE("fixation after a snap is recorded and the path may continue") {
  SdeOptions opts;
  opts.t_end = 1.0;
  const SdePath path = simulate_sde(SdeKind::kSizeFrequency, {5.0, 1.0}, kNeutral, opts, 1);
  REQUIRE(path.fixation.has_value());
  CHECK(path.fixation->kind == AbsorptionKind::kFixationA);
  CHECK(path.fixation->time == 0.0);
  CHECK(path.absorption.kind == AbsorptionKind::kNone);
  CHECK(path.times.back() == 1.0);
  for (const auto& st : path.states) CHECK(st[1] == 1.0);
}

TEST_CASE("paths are seed-reproducible") {
  SdeOptions opts;
  opts.t_end = 2.0;
  for (SdeKind kind : {SdeKind::kAlleleCounts, SdeKind::kSizeFrequency, SdeKind::kKolmogorov}) {
    const Vector2 start = initial_state(kind, 3.0, 0.5, 1.0);
    const SdePath a = simulate_sde(kind, start, kNeutral, opts, 77);
    const SdePath b = simulate_sde(kind, start, kNeutral, opts, 77);
    const SdePath c = simulate_sde(kind, start, kNeutral, opts, 78);
    CHECK(a.states == b.states);
    CHECK(a.states != c.states);
  }
}

TEST_CASE("option and input validation") {
  SdeOptions opts;
  opts.dt = 0.0;
  CHECK_THROWS_AS(simulate_sde(SdeKind::kSizeFrequency, {1.0, 0.5}, kNeutral, opts, 1), ValidationError);
  opts.dt = -1e-3;
  CHECK_THROWS_AS(opts.validate(), ValidationError);
  CHECK_THROWS_AS(simulate_sde(SdeKind::kSizeFrequency, {1.0, 1.5}, kNeutral, {}, 1), ValidationError);
  CHECK_THROWS_AS(simulate_sde(SdeKind::kKolmogorov, {0.0, -1.0}, kNeutral, {}, 1), ValidationError);
  CHECK_THROWS_AS(parse_sde_kind("xy"), ValidationError);
  CHECK(parse_sde_kind(to_string(SdeKind::kHaploid)) == SdeKind::kHaploid);
}

TEST_CASE("neutral fixation probability equals the initial frequency") {
  SdeOptions opts;
  opts.t_end = 400.0;
  const FixationEstimate est = fixation_experiment(kNeutral, 10.0, 0.3, 600, opts, 5, 4);
  INFO("fixed A " << est.fixed_A << ", fixed a " << est.fixed_a << ", extinct " << est.extinct_first
                  << ", unresolved " << est.unresolved);
  CHECK(std::abs(est.probability_A - 0.3) < 3 * est.standard_error);
  CHECK(est.fixed_A + est.fixed_a + est.extinct_first + est.unresolved == est.paths);
}

TEST_CASE("fixation experiment does not depend on the thread count") {
  SdeOptions opts;
  opts.t_end = 5.0;
  const auto a = fixation_experiment(kNeutral, 3.0, 0.5, 40, opts, 9, 1);
  const auto b = fixation_experiment(kNeutral, 3.0, 0.5, 40, opts, 9, 3);
  CHECK(a.fixed_A == b.fixed_A);
  CHECK(a.fixed_a == b.fixed_a);
  CHECK(a.extinct_first == b.extinct_first);
}

TEST_CASE("diploid allele frequency has half the haploid quadratic variation") {
  const QuadraticVariationReport r = quadratic_variation_ratio(kNeutral, 10.0, 0.3, 1e-3, 100000, 3);
  CHECK(r.diploid == doctest::Approx(0.3 * 0.7 / 10.0).epsilon(0.03));
  CHECK(r.haploid == doctest::Approx(2 * 0.3 * 0.7 / 10.0).epsilon(0.03));
  CHECK(r.ratio == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("populations under heavy death go extinct") {
  SdeOptions opts;
  opts.t_end = 50.0;
  const auto harsh = DemographicParams::uniform(1.0, 3.0, 0.1, 1.0);
  const ExtinctionEstimate est = extinction_experiment(harsh, 2.0, 0.5, 50, opts, 1, 2);
  CHECK(est.extinct == 50);
  CHECK(est.fraction == 1.0);
  CHECK(est.mean_extinction_time > 0.0);
}
