#include "diploid/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace diploid {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

bool DemographicParams::neutral() const {
  for (int i = 1; i < 3; ++i) {
    if (beta[i] != beta[0] || delta[i] != delta[0]) return false;
  }
  for (const auto& row : alpha) {
    for (double a : row) {
      if (a != alpha[0][0]) return false;
    }
  }
  return true;
}

bool DemographicParams::alpha_symmetric() const {
  return alpha[0][1] == alpha[1][0] && alpha[0][2] == alpha[2][0] && alpha[1][2] == alpha[2][1];
}

void DemographicParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("gamma must be positive and finite");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(beta[i] >= 0.0) || !std::isfinite(beta[i])) {
      throw ValidationError("beta" + std::to_string(i + 1) + " must be nonnegative and finite");
    }
    if (!(delta[i] >= 0.0) || !std::isfinite(delta[i])) {
      throw ValidationError("delta" + std::to_string(i + 1) + " must be nonnegative and finite");
    }
    for (int j = 0; j < 3; ++j) {
      if (!std::isfinite(alpha[i][j])) {
        throw ValidationError("alpha" + std::to_string(i + 1) + std::to_string(j + 1) +
                              " must be finite");
      }
    }
  }
}

DemographicParams DemographicParams::uniform(double beta, double delta, double alpha,
                                             double gamma) {
  DemographicParams p;
  p.beta.fill(beta);
  p.delta.fill(delta);
  for (auto& row : p.alpha) row.fill(alpha);
  p.gamma = gamma;
  return p;
}

GenotypeState GenotypeCounts::rescaled() const {
  const double k = static_cast<double>(K);
  return {static_cast<double>(counts[0]) / k, static_cast<double>(counts[1]) / k,
          static_cast<double>(counts[2]) / k};
}

void GenotypeCounts::validate() const {
  if (K <= 0) throw ValidationError("scaling parameter K must be a positive integer");
  for (auto c : counts) {
    if (c < 0) throw ValidationError("genotype counts must be nonnegative");
  }
}

GenotypeCounts GenotypeCounts::from_state(const GenotypeState& z, std::int64_t K) {
  if (K <= 0) throw ValidationError("scaling parameter K must be a positive integer");
  GenotypeCounts out{{}, K};
  const double zs[3] = {z.z1, z.z2, z.z3};
  for (int i = 0; i < 3; ++i) {
    const double scaled = zs[i] * static_cast<double>(K);
    const double rounded = std::round(scaled);
    if (!(zs[i] >= 0.0) || std::abs(scaled - rounded) > 1e-9 * std::max(1.0, scaled)) {
      throw ValidationError("state is not on the lattice (Z+/K)^3");
    }
    out.counts[i] = static_cast<std::int64_t>(rounded);
  }
  return out;
}

GenotypeCounts GenotypeCounts::nearest(const GenotypeState& z, std::int64_t K) {
  if (K <= 0) throw ValidationError("scaling parameter K must be a positive integer");
  GenotypeCounts out{{}, K};
  const double zs[3] = {z.z1, z.z2, z.z3};
  for (int i = 0; i < 3; ++i) {
    if (!(zs[i] >= 0.0)) throw ValidationError("genotype masses must be nonnegative");
    out.counts[i] = std::llround(zs[i] * static_cast<double>(K));
  }
  return out;
}

Vector3 birth_rates(const GenotypeState& z, const DemographicParams& p, std::int64_t K,
                    RateScaling scaling) {
  const double n = z.n();
  if (n <= 0.0) return {0.0, 0.0, 0.0};
  const double k = static_cast<double>(K);
  const double fast = scaling == RateScaling::kSlowFast ? p.gamma * k : 0.0;
  const double allele_a_big = z.z1 + 0.5 * z.z2;
  const double allele_a_small = z.z3 + 0.5 * z.z2;
  return {k * (fast + p.beta[0]) / n * allele_a_big * allele_a_big,
          k * (fast + p.beta[1]) / n * 2.0 * allele_a_big * allele_a_small,
          k * (fast + p.beta[2]) / n * allele_a_small * allele_a_small};
}

Vector3 death_rates(const GenotypeState& z, const DemographicParams& p, std::int64_t K,
                    RateScaling scaling) {
  const double k = static_cast<double>(K);
  const double fast = scaling == RateScaling::kSlowFast ? p.gamma * k : 0.0;
  const double zs[3] = {z.z1, z.z2, z.z3};
  Vector3 rates{};
  for (int i = 0; i < 3; ++i) {
    double per_capita = fast + p.delta[i];
    for (int j = 0; j < 3; ++j) per_capita += p.alpha[j][i] * zs[j];
    rates[i] = k * zs[i] * positive_part(per_capita);
  }
  return rates;
}

Vector3 birth_rates(const GenotypeCounts& z, const DemographicParams& p, RateScaling scaling) {
  return birth_rates(z.rescaled(), p, z.K, scaling);
}

Vector3 death_rates(const GenotypeCounts& z, const DemographicParams& p, RateScaling scaling) {
  return death_rates(z.rescaled(), p, z.K, scaling);
}

NxyState to_nxy(const GenotypeState& z) {
  const double n = z.n();
  if (n <= 0.0) return {0.0, std::nullopt, 0.0};
  return {n, (2.0 * z.z1 + z.z2) / (2.0 * n), (4.0 * z.z1 * z.z3 - z.z2 * z.z2) / (4.0 * n)};
}

bool in_nxy_domain(double n, double x, double y, double tolerance) {
  if (!(n > 0.0) || !std::isfinite(n)) return false;
  if (!(x >= -tolerance && x <= 1.0 + tolerance)) return false;
  const double slack = tolerance * n;
  const double lower = -n * std::min(x * x, (1.0 - x) * (1.0 - x));
  const double upper = n * x * (1.0 - x);
  return y >= lower - slack && y <= upper + slack;
}

GenotypeState from_nxy(const NxyState& s) {
  if (!s.x) throw ValidationError("allele frequency undefined (n = 0) has no genotype preimage");
  const double n = s.n;
  const double x = *s.x;
  const double y = s.y;
  if (!in_nxy_domain(n, x, y)) {
    std::ostringstream msg;
    msg << "(n, x, y) = (" << n << ", " << x << ", " << y << ") is outside the image domain";
    throw ValidationError(msg.str());
  }
  return {std::max(0.0, n * x * x + y), std::max(0.0, 2.0 * n * x * (1.0 - x) - 2.0 * y),
          std::max(0.0, n * (1.0 - x) * (1.0 - x) + y)};
}

double hardy_weinberg_deviation(const GenotypeCounts& z) {
  const std::int64_t total = z.total();
  if (total == 0) return 0.0;
  const double numerator = 4.0 * static_cast<double>(z.counts[0]) * static_cast<double>(z.counts[2]) -
                           static_cast<double>(z.counts[1]) * static_cast<double>(z.counts[1]);
  return numerator / (4.0 * static_cast<double>(z.K) * static_cast<double>(total));
}

double s_angle(const SState& s) {
  return std::clamp(std::atan2(s.s2, s.s1), 0.0, kMaxAngle);
}

SState to_s(double n, double x, double gamma) {
  if (!(n > 0.0)) throw ValidationError("to_s requires n > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("to_s requires x in [0, 1]");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  const double radius = std::sqrt(2.0 * n / gamma);
  const double angle = std::acos(std::clamp(2.0 * x - 1.0, -1.0, 1.0)) / kSqrt2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

SizeFrequency from_s(const SState& s, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (is_origin(s)) throw ValidationError("from_s is undefined at the origin (extinction)");
  if (!in_domain(s)) throw ValidationError("point lies outside the Kolmogorov domain");
  const double x = 0.5 * (1.0 + std::cos(kSqrt2 * s_angle(s)));
  return {0.5 * gamma * s.radius_squared(), std::clamp(x, 0.0, 1.0)};
}

bool in_domain(const SState& s, double tolerance) {
  if (!std::isfinite(s.s1) || !std::isfinite(s.s2)) return false;
  const double slack = tolerance * std::sqrt(s.radius_squared());
  return s.s2 >= -slack && s.s2 - kBoundarySlope * s.s1 >= -slack;
}

bool on_fixation_boundary_A(const SState& s, double tolerance) {
  return s.s1 > 0.0 && std::abs(s.s2) <= tolerance * s.s1;
}

bool on_fixation_boundary_a(const SState& s, double tolerance) {
  const double r = std::sqrt(s.radius_squared());
  return s.s2 > 0.0 && s.s1 < 0.0 && std::abs(s.s2 - kBoundarySlope * s.s1) <= tolerance * r;
}

bool is_origin(const SState& s) { return s.s1 == 0.0 && s.s2 == 0.0; }

double g_value(const GenotypeState& z, const Matrix3& alpha) {
  const double zs[3] = {z.z1, z.z2, z.z3};
  double g = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g += alpha[i][j] * zs[i] * zs[j];
  }
  return g;
}

namespace {

bool symmetric(const Matrix3& a) {
  return a[0][1] == a[1][0] && a[0][2] == a[2][0] && a[1][2] == a[2][1];
}

// Conditions for a pivot index i with the two remaining indices j, l.
bool condition_holds(const Matrix3& a, H1Condition c, int i, int j, int l) {
  switch (c) {
    case H1Condition::kAllPositive:
      for (const auto& row : a) {
        for (double v : row) {
          if (!(v > 0.0)) return false;
        }
      }
      return true;
    case H1Condition::kPositiveRow:
      return a[i][0] > 0.0 && a[i][1] > 0.0 && a[i][2] > 0.0 && a[j][l] * a[j][l] < a[j][j] * a[l][l];
    case H1Condition::kDominantProduct:
      return a[i][i] * a[j][l] > a[i][j] * a[i][l] && a[i][j] * a[i][j] < a[i][i] * a[j][j] &&
             a[i][l] * a[i][l] < a[i][i] * a[l][l];
    case H1Condition::kDiscriminant: {
      if (!(a[i][j] * a[i][j] < a[i][i] * a[j][j] && a[i][l] * a[i][l] < a[i][i] * a[l][l])) {
        return false;
      }
      const double cross = a[i][i] * a[j][l] - a[i][j] * a[i][l];
      return cross * cross <
             (a[i][i] * a[l][l] - a[i][l] * a[i][l]) * (a[i][i] * a[j][j] - a[i][j] * a[i][j]);
    }
  }
  return false;
}

}  // namespace

H1Report validate_h1(const Matrix3& alpha, int grid_resolution) {
  if (grid_resolution < 1) throw ValidationError("grid resolution must be positive");
  H1Report report;
  report.symmetric = symmetric(alpha);
  report.conditions_applicable = report.symmetric;

  if (report.symmetric && alpha[0][0] > 0.0 && alpha[1][1] > 0.0 && alpha[2][2] > 0.0) {
    constexpr H1Condition kOrder[] = {H1Condition::kAllPositive, H1Condition::kPositiveRow,
                                      H1Condition::kDominantProduct, H1Condition::kDiscriminant};
    for (H1Condition c : kOrder) {
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int l = (i + 2) % 3;
        if (condition_holds(alpha, c, i, j, l)) {
          report.satisfied = true;
          report.method = H1Method::kSufficientCondition;
          report.condition = c;
          report.pivot = c == H1Condition::kAllPositive ? -1 : i;
          return report;
        }
      }
    }
  }

  // Heuristic fallback: min of sum alpha_ij p_i p_j over a barycentric grid.
  report.method = H1Method::kGridHeuristic;
  report.grid_minimum = std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(grid_resolution);
  for (int i = 0; i <= grid_resolution; ++i) {
    for (int j = 0; i + j <= grid_resolution; ++j) {
      const int k = grid_resolution - i - j;
      const GenotypeState p{i / m, j / m, k / m};
      const double f = g_value(p, alpha);
      if (f < report.grid_minimum) {
        report.grid_minimum = f;
        report.grid_point = {p.z1, p.z2, p.z3};
      }
    }
  }
  report.satisfied = report.grid_minimum > 0.0;
  return report;
}

std::string H1Report::describe() const {
  std::ostringstream out;
  out << (satisfied ? "H1 satisfied" : "H1 not established");
  if (!conditions_applicable) out << "; sufficient conditions inapplicable (alpha not symmetric)";
  if (method == H1Method::kSufficientCondition && condition) {
    static const char* kNames[] = {"", "(i)", "(ii)", "(iii)", "(iv)"};
    out << " via sufficient condition " << kNames[static_cast<int>(*condition)];
    if (pivot >= 0) out << " with pivot index " << pivot + 1;
  } else {
    out << "; grid heuristic: min f(p) = " << grid_minimum << " at p = (" << grid_point[0] << ", "
        << grid_point[1] << ", " << grid_point[2] << ")";
  }
  return out.str();
}

}  // namespace diploid
