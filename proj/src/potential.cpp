#include "diploid/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <sstream>

#include "diploid/random.hpp"

namespace diploid {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Polar quantities shared by q and Q.
struct Polar {
  double r2 = 0.0;
  double angle = 0.0;
  double h = 0.0;  // cos(sqrt2 angle) = 2x - 1
  double sn = 0.0;  // sin(sqrt2 angle) = 2 sqrt(x(1-x))
  double n = 0.0;
  double x = 0.0;
};

Polar polar(const SState& s, double gamma) {
  if (!in_domain(s, 0.0) || is_origin(s)) {
    throw ValidationError("q and Q are defined on the interior of the domain only");
  }
  Polar out;
  out.r2 = s.radius_squared();
  out.angle = s_angle(s);
  out.h = std::cos(kSqrt2 * out.angle);
  out.sn = std::sin(kSqrt2 * out.angle);
  if (!(out.sn > 0.0)) throw ValidationError("q and Q are singular on the fixation boundaries");
  out.n = 0.5 * gamma * out.r2;
  out.x = 0.5 * (1.0 + out.h);
  return out;
}

void require_symmetric(const DemographicParams& p) {
  if (!p.alpha_symmetric()) {
    throw ValidationError("alpha is not symmetric: the drift q is not a gradient and Q does not exist");
  }
}

void require_neutral(const DemographicParams& p) {
  if (!p.neutral()) throw ValidationError("the neutral closed form needs neutral parameters");
}

// Hardy-Weinberg proportions at x.
Vector3 hw(double x) { return {x * x, 2.0 * x * (1.0 - x), (1.0 - x) * (1.0 - x)}; }

}  // namespace

Vector2 s_drift(const SState& s, const DemographicParams& p) {
  const Polar c = polar(s, p.gamma);
  const GrowthTerms g = growth_terms(c.n, c.x, p);
  const double cot = c.h / c.sn;
  const double root = 0.5 * c.sn;  // sqrt(x(1-x))
  return {s.s1 / c.r2 - s.s2 / c.r2 * cot / kSqrt2 - 0.5 * s.s1 * g.mean -
              s.s2 / kSqrt2 * root * g.selection,
          s.s2 / c.r2 + s.s1 / c.r2 * cot / kSqrt2 - 0.5 * s.s2 * g.mean +
              s.s1 / kSqrt2 * root * g.selection};
}

Vector2 q_drift_general(const SState& s, const DemographicParams& p) {
  require_symmetric(p);
  return s_drift(s, p);
}

Vector2 q_drift_neutral(const SState& s, const DemographicParams& p) {
  require_neutral(p);
  const Polar c = polar(s, p.gamma);
  const double cot = c.h / c.sn;
  const double radial =
      0.5 * (p.beta[0] - p.delta[0] - 0.5 * p.alpha[0][0] * p.gamma * c.r2) - 1.0 / c.r2;
  return {-s.s2 / c.r2 * cot / kSqrt2 - s.s1 * radial, s.s1 / c.r2 * cot / kSqrt2 - s.s2 * radial};
}

Vector2 q_drift(const SState& s, const DemographicParams& p) {
  require_symmetric(p);
  return p.neutral() ? q_drift_neutral(s, p) : q_drift_general(s, p);
}

double q1_expanded(const SState& s, const DemographicParams& p) {
  require_symmetric(p);
  if (s.s1 < 0.0) throw ValidationError("the expanded q1 is stated for s1 >= 0");
  const Polar c = polar(s, p.gamma);
  const double g = p.gamma;
  const double r2 = c.r2;
  const double h = c.h;
  const double b1 = p.beta[0] - p.delta[0];
  const double b2 = p.beta[1] - p.delta[1];
  const double b3 = p.beta[2] - p.delta[2];
  const double a11 = p.alpha[0][0], a12 = p.alpha[0][1], a13 = p.alpha[0][2];
  const double a22 = p.alpha[1][1], a23 = p.alpha[1][2], a33 = p.alpha[2][2];

  const double quartic = a11 - 4.0 * a12 + 2.0 * a13 - 4.0 * a23 + 4.0 * a22 + a33;
  const double base = a11 + 4.0 * a12 + 2.0 * a13 + 4.0 * a23 + 4.0 * a22 + a33;
  const double odd1 = a11 + 2.0 * a12 - 2.0 * a23 - a33;
  const double even2 = 3.0 * a11 - 2.0 * a13 - 4.0 * a22 + 3.0 * a33;
  const double odd3 = a11 - 2.0 * a12 + 2.0 * a23 - a33;

  double q1 = s.s1 / r2 - s.s2 / (r2 * kSqrt2 * std::tan(kSqrt2 * c.angle));
  q1 -= s.s1 * ((b1 + 2.0 * b2 + b3) / 8.0 - r2 / 4.0 * g * base / 16.0);
  q1 -= 2.0 * s.s1 * (h * (b1 - b3) / 8.0 + h * h * (b1 - 2.0 * b2 + b3) / 16.0);
  q1 += s.s1 * r2 / 4.0 * g * h *
        (odd1 / 4.0 + h * even2 / 8.0 + h * h * odd3 / 4.0 + h * h * h * quartic / 16.0);
  q1 -= kSqrt2 * s.s2 * c.sn * ((b1 - b3) / 8.0 + h * (b1 - 2.0 * b2 + b3) / 8.0);
  q1 += r2 / 16.0 * g * kSqrt2 * s.s2 * c.sn *
        (odd1 / 4.0 + h * even2 / 4.0 + h * h * 3.0 * odd3 / 4.0 + h * h * h * quartic / 4.0);
  return q1;
}

double potential_Q(const SState& s, const DemographicParams& p) {
  require_symmetric(p);
  const Polar c = polar(s, p.gamma);
  const Vector3 w = hw(c.x);
  double m0 = 0.0;
  double m1 = 0.0;
  for (int i = 0; i < 3; ++i) {
    m0 += w[i] * (p.beta[i] - p.delta[i]);
    for (int j = 0; j < 3; ++j) m1 += p.alpha[i][j] * w[i] * w[j];
  }
  return 0.5 * std::log(c.r2) + 0.5 * std::log(c.sn) - c.r2 * m0 / 4.0 +
         p.gamma * c.r2 * c.r2 * m1 / 16.0;
}

double potential_Q_neutral(const SState& s, const DemographicParams& p) {
  require_neutral(p);
  const Polar c = polar(s, p.gamma);
  const double growth = p.beta[0] - p.delta[0] - p.alpha[0][0] * p.gamma * c.r2 / 4.0;
  return 0.5 * std::log(c.r2) + 0.5 * std::log(c.sn) - growth * c.r2 / 4.0;
}

Vector2 potential_gradient_fd(const SState& s, const DemographicParams& p, double h) {
  return {(potential_Q({s.s1 + h, s.s2}, p) - potential_Q({s.s1 - h, s.s2}, p)) / (2.0 * h),
          (potential_Q({s.s1, s.s2 + h}, p) - potential_Q({s.s1, s.s2 - h}, p)) / (2.0 * h)};
}

double f_functional(const SState& s, const DemographicParams& p, double h) {
  const Vector2 q = s_drift(s, p);
  const double div = (s_drift({s.s1 + h, s.s2}, p)[0] - s_drift({s.s1 - h, s.s2}, p)[0] +
                      s_drift({s.s1, s.s2 + h}, p)[1] - s_drift({s.s1, s.s2 - h}, p)[1]) /
                     (2.0 * h);
  return q[0] * q[0] + q[1] * q[1] - div;
}

double f_neutral_closed(const SState& s, const DemographicParams& p) {
  require_neutral(p);
  const Polar c = polar(s, p.gamma);
  const double alpha = p.alpha[0][0];
  const double m = p.beta[0] - p.delta[0] - 0.5 * alpha * p.gamma * c.r2;
  const double cot = c.h / c.sn;
  const double csc = 1.0 / c.sn;
  return 1.0 / c.r2 + c.r2 * m * m / 4.0 - 0.5 * alpha * p.gamma * c.r2 +
         cot * cot / (2.0 * c.r2) + csc * csc / c.r2;
}

std::vector<SState> sample_interior(std::size_t count, std::uint64_t seed, double r_min,
                                    double r_max, double angle_margin) {
  if (!(r_min > 0.0 && r_max >= r_min)) throw ValidationError("need 0 < r_min <= r_max");
  if (!(angle_margin >= 0.0 && 2.0 * angle_margin < kMaxAngle)) {
    throw ValidationError("angle margin leaves no interior");
  }
  RandomStream rng(seed, 0);
  std::vector<SState> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = r_min + (r_max - r_min) * rng.uniform();
    const double angle = angle_margin + (kMaxAngle - 2.0 * angle_margin) * rng.uniform();
    out.push_back({r * std::cos(angle), r * std::sin(angle)});
  }
  return out;
}

namespace {

std::string describe_sample(const std::vector<SState>& sample, double h) {
  double r_lo = std::numeric_limits<double>::infinity(), r_hi = 0.0;
  double a_lo = kMaxAngle, a_hi = 0.0;
  for (const auto& s : sample) {
    const double r = std::sqrt(s.radius_squared());
    r_lo = std::min(r_lo, r);
    r_hi = std::max(r_hi, r);
    a_lo = std::min(a_lo, s_angle(s));
    a_hi = std::max(a_hi, s_angle(s));
  }
  std::ostringstream out;
  out << sample.size() << " interior points, radius in [" << r_lo << ", " << r_hi
      << "], angle in [" << a_lo << ", " << a_hi << "], central differences with step " << h;
  return out.str();
}

double cross_partial_at(const SState& s, const DemographicParams& p, double h) {
  const double dq1_ds2 = (s_drift({s.s1, s.s2 + h}, p)[0] - s_drift({s.s1, s.s2 - h}, p)[0]) / (2.0 * h);
  const double dq2_ds1 = (s_drift({s.s1 + h, s.s2}, p)[1] - s_drift({s.s1 - h, s.s2}, p)[1]) / (2.0 * h);
  return std::abs(dq1_ds2 - dq2_ds1);
}

}  // namespace

DriftCheckReport cross_partial_residual(const DemographicParams& p,
                                        const std::vector<SState>& sample, double h) {
  DriftCheckReport report;
  report.sample_size = sample.size();
  report.sample_description = describe_sample(sample, h);
  for (const auto& s : sample) {
    report.max_cross_partial_residual =
        std::max(report.max_cross_partial_residual, cross_partial_at(s, p, h));
  }
  return report;
}

DriftCheckReport drift_check(const DemographicParams& p, const std::vector<SState>& sample,
                             double h) {
  DriftCheckReport report = cross_partial_residual(p, sample, h);
  if (!p.alpha_symmetric()) return report;
  double worst = 0.0;
  for (const auto& s : sample) {
    const Vector2 q = q_drift(s, p);
    const Vector2 grad = potential_gradient_fd(s, p, h);
    worst = std::max({worst, std::abs(q[0] - grad[0]), std::abs(q[1] - grad[1])});
  }
  report.max_gradient_residual = worst;
  return report;
}

}  // namespace diploid
