#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "diploid/potential.hpp"
#include "diploid/random.hpp"

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

SState polar_point(double r, double angle) { return {r * std::cos(angle), r * std::sin(angle)}; }

}  // namespace

TEST_CASE("q is the gradient of Q for random symmetric parameters") {
  RandomStream rng(31, 0);
  const auto sample = sample_interior(1000, 7);
  for (int set = 0; set < 5; ++set) {
    const DemographicParams p = random_symmetric(rng);
    const DriftCheckReport r = drift_check(p, sample);
    REQUIRE(r.max_gradient_residual.has_value());
    CHECK(*r.max_gradient_residual < 1e-6);
    CHECK(r.max_cross_partial_residual < 1e-6);
    CHECK(r.sample_size == 1000);
  }
}

TEST_CASE("a non-symmetric perturbation breaks the cross-partial identity") {
  auto p = kNeutral;
  p.alpha[0][1] += 0.1;
  const auto sample = sample_interior(1000, 7);
  const DriftCheckReport r = drift_check(p, sample);
  CHECK_FALSE(r.max_gradient_residual.has_value());
  CHECK(r.max_cross_partial_residual > 1e-3);
  CHECK_THROWS_AS(q_drift(sample.front(), p), ValidationError);
  CHECK_THROWS_AS(potential_Q(sample.front(), p), ValidationError);
}

TEST_CASE("without competition the cross-partial residual vanishes") {
  const auto p = DemographicParams::uniform(1.0, 0.3, 0.0, 1.0);
  const DriftCheckReport r = cross_partial_residual(p, sample_interior(200, 3));
  CHECK(r.max_cross_partial_residual < 1e-7);
}

TEST_CASE("general q and Q reduce to the neutral closed forms") {
  RandomStream rng(41, 0);
  for (int set = 0; set < 3; ++set) {
    const auto p = DemographicParams::uniform(0.5 + rng.uniform(), rng.uniform(), 0.05 + 0.2 * rng.uniform(),
                                              0.5 + rng.uniform());
    const auto sample = sample_interior(1000, 100 + set, 0.1, 10.0, 1e-3);
    const SState ref = sample.front();
    for (const auto& s : sample) {
      const Vector2 general = q_drift_general(s, p);
      const Vector2 neutral = q_drift_neutral(s, p);
      CHECK(std::abs(general[0] - neutral[0]) < 1e-10 * std::max(1.0, std::abs(neutral[0])));
      CHECK(std::abs(general[1] - neutral[1]) < 1e-10 * std::max(1.0, std::abs(neutral[1])));
      const double dq = (potential_Q(s, p) - potential_Q(ref, p)) -
                        (potential_Q_neutral(s, p) - potential_Q_neutral(ref, p));
      CHECK(std::abs(dq) < 1e-10 * std::max(1.0, std::abs(potential_Q(s, p))));
    }
  }
}

TEST_CASE("the expanded first component matches q on the right half-plane") {
  RandomStream rng(43, 0);
  for (int set = 0; set < 5; ++set) {
    const DemographicParams p = random_symmetric(rng);
    for (const auto& s : sample_interior(1000, 200 + set, 0.1, 10.0, 1e-3)) {
      if (s.s1 < 0.0) {
        CHECK_THROWS_AS(q1_expanded(s, p), ValidationError);
        continue;
      }
      const double q1 = q_drift(s, p)[0];
      CHECK(std::abs(q1_expanded(s, p) - q1) < 1e-10 * std::max(1.0, std::abs(q1)));
    }
  }
}

TEST_CASE("neutral drift is radial on the symmetry ray x = 1/2") {
  const double angle = kMaxAngle / 2.0;
  for (double r : {0.3, 1.0, 4.0, 12.0}) {
    const SState s = polar_point(r, angle);
    const Vector2 q = q_drift(s, kNeutral);
    const double angular = -std::sin(angle) * q[0] + std::cos(angle) * q[1];
    CHECK(std::abs(angular) < 1e-10);
  }
}

TEST_CASE("Q diverges logarithmically at the fixation boundaries") {
  for (double r : {1.0, 3.0}) {
    const double mid = potential_Q(polar_point(r, kMaxAngle / 2), kNeutral);
    const double near_A = potential_Q(polar_point(r, 1e-6), kNeutral);
    const double near_a = potential_Q(polar_point(r, kMaxAngle - 1e-6), kNeutral);
    CHECK(mid - near_A > 5.0);
    CHECK(mid - near_a > 5.0);
  }
}

TEST_CASE("Q and q are continuous across the vertical axis") {
  RandomStream rng(45, 0);
  const DemographicParams p = random_symmetric(rng);
  for (double s2 : {0.5, 2.0, 7.0}) {
    const SState left{-1e-12, s2}, right{1e-12, s2};
    CHECK(std::abs(potential_Q(left, p) - potential_Q(right, p)) < 1e-9);
    const Vector2 ql = q_drift(left, p), qr = q_drift(right, p);
    CHECK(std::abs(ql[0] - qr[0]) < 1e-9);
    CHECK(std::abs(ql[1] - qr[1]) < 1e-9);
  }
}

TEST_CASE("q and Q reject points outside the interior") {
  CHECK_THROWS_AS(q_drift({1.0, 0.0}, kNeutral), ValidationError);
  CHECK_THROWS_AS(q_drift({0.0, 0.0}, kNeutral), ValidationError);
  CHECK_THROWS_AS(potential_Q({0.0, -1.0}, kNeutral), ValidationError);
}

TEST_CASE("Kolmogorov coordinates have unit noise and drift -q") {
  // Ito's formula applied to s(n, x) with the (N, X) coefficients, using
  // central differences of the inverse map: an oracle independent of q.
  RandomStream rng(47, 0);
  for (int set = 0; set < 3; ++set) {
    const DemographicParams p = random_symmetric(rng);
    for (const auto& s : sample_interior(50, 300 + set, 0.8, 5.0, 0.2)) {
      const SizeFrequency v = from_s(s, p.gamma);
      // Smaller steps for first derivatives, larger ones for second derivatives.
      const double hn = 1e-4 * v.n, hx = 1e-4;
      const double gn = 1e-6 * v.n, gx = 1e-6;
      auto sv = [&](double n, double x) {
        const SState t = to_s(n, x, p.gamma);
        return Vector2{t.s1, t.s2};
      };
      Vector2 dn, dx, dnn, dxx;
      for (int c = 0; c < 2; ++c) {
        const double pn = sv(v.n + hn, v.x)[c], mn = sv(v.n - hn, v.x)[c];
        const double px = sv(v.n, v.x + hx)[c], mx = sv(v.n, v.x - hx)[c];
        const double z = sv(v.n, v.x)[c];
        dn[c] = (sv(v.n + gn, v.x)[c] - sv(v.n - gn, v.x)[c]) / (2 * gn);
        dx[c] = (sv(v.n, v.x + gx)[c] - sv(v.n, v.x - gx)[c]) / (2 * gx);
        dnn[c] = (pn - 2 * z + mn) / (hn * hn);
        dxx[c] = (px - 2 * z + mx) / (hx * hx);
      }
      const Vector2 mu = drift_nx(v.n, v.x, p);
      const Vector2 sigma = diffusion_nx(v.n, v.x, p.gamma);
      const Vector2 q = s_drift(s, p);
      for (int c = 0; c < 2; ++c) {
        const double ito = dn[c] * mu[0] + dx[c] * mu[1] +
                           0.5 * (dnn[c] * sigma[0] * sigma[0] + dxx[c] * sigma[1] * sigma[1]);
        CHECK(ito == doctest::Approx(-q[c]).epsilon(1e-5).scale(1.0));
      }
      // Noise matrix J diag(sigma) must be orthogonal.
      const double c00 = dn[0] * dn[0] * sigma[0] * sigma[0] + dx[0] * dx[0] * sigma[1] * sigma[1];
      const double c11 = dn[1] * dn[1] * sigma[0] * sigma[0] + dx[1] * dx[1] * sigma[1] * sigma[1];
      const double c01 = dn[0] * dn[1] * sigma[0] * sigma[0] + dx[0] * dx[1] * sigma[1] * sigma[1];
      CHECK(c00 == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(c11 == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(c01) < 1e-6);
    }
  }
}

TEST_CASE("neutral closed-form F matches the finite-difference F") {
  for (const auto& s : sample_interior(100, 11)) {
    CHECK(std::abs(f_functional(s, kNeutral) - f_neutral_closed(s, kNeutral)) <
          1e-4 * std::max(1.0, std::abs(f_neutral_closed(s, kNeutral))));
  }
}

TEST_CASE("F is bounded below and grows at infinity") {
  double minimum = std::numeric_limits<double>::infinity();
  double argmin_radius = 0.0;
  for (const auto& s : sample_interior(20000, 13, 0.05, 20.0, 1e-3)) {
    const double f = f_functional(s, kNeutral);
    if (f < minimum) {
      minimum = f;
      argmin_radius = std::sqrt(s.radius_squared());
    }
  }
  CHECK(std::isfinite(minimum));
  CHECK(argmin_radius > 0.5);
  for (double angle : {0.3, kMaxAngle / 2, 1.9}) {
    const double f5 = f_functional(polar_point(5.0, angle), kNeutral);
    const double f50 = f_functional(polar_point(50.0, angle), kNeutral);
    CHECK(f50 >= 10.0 * std::abs(f5));
  }
}
