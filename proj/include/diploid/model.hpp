#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace diploid {

/// Invalid input: parameters, states outside their domain, malformed config.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A simulation could not continue (numerical breakdown, ensemble wiped out).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vector3 = std::array<double, 3>;
using Matrix3 = std::array<Vector3, 3>;

/// Model constants for genotypes AA, Aa, aa (indices 0, 1, 2).
///
/// Under the slow-fast scaling the per-capita birth and death rates are
/// gamma*K + beta[i] and gamma*K + delta[i], and the interaction of type j on
/// type i is alpha[j][i] / K.
struct DemographicParams {
  Vector3 beta{};
  Vector3 delta{};
  Matrix3 alpha{};
  double gamma = 1.0;

  /// All parameters independent of genotype.
  bool neutral() const;
  bool alpha_symmetric() const;
  /// Throws ValidationError unless gamma > 0 and beta, delta >= 0.
  void validate() const;

  static DemographicParams uniform(double beta, double delta, double alpha, double gamma);

  bool operator==(const DemographicParams&) const = default;
};

/// Rescaled genotype masses (z1, z2, z3) = counts / K, or any nonnegative
/// reals for limit objects.
struct GenotypeState {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;

  double n() const { return z1 + z2 + z3; }
  bool operator==(const GenotypeState&) const = default;
};

/// Exact-process state: integer genotype counts plus the scaling K.
struct GenotypeCounts {
  std::array<std::int64_t, 3> counts{};
  std::int64_t K = 1;

  std::int64_t total() const { return counts[0] + counts[1] + counts[2]; }
  bool extinct() const { return total() == 0; }
  GenotypeState rescaled() const;
  /// Throws ValidationError for K <= 0 or negative counts.
  void validate() const;

  /// Lattice point K*z; throws unless every K*z_i is a nonnegative integer.
  static GenotypeCounts from_state(const GenotypeState& z, std::int64_t K);
  /// Nearest lattice point to K*z.
  static GenotypeCounts nearest(const GenotypeState& z, std::int64_t K);

  bool operator==(const GenotypeCounts&) const = default;
};

/// Population size, allele-A frequency and Hardy-Weinberg deviation.
/// `x` is empty exactly when n == 0.
struct NxyState {
  double n = 0.0;
  std::optional<double> x;
  double y = 0.0;
};

/// Population size and allele-A frequency.
struct SizeFrequency {
  double n = 0.0;
  double x = 0.0;
};

/// Kolmogorov coordinates.
struct SState {
  double s1 = 0.0;
  double s2 = 0.0;

  double radius_squared() const { return s1 * s1 + s2 * s2; }
};

/// Slope of the boundary ray a: s2 = u*s1 with u = tan(pi/sqrt(2)) < 0.
inline const double kBoundarySlope = std::tan(std::numbers::pi / std::numbers::sqrt2);
/// Opening angle of the domain: theta ranges over [0, pi/sqrt(2)].
inline constexpr double kMaxAngle = std::numbers::pi / std::numbers::sqrt2;

enum class RateScaling {
  /// b_i = gamma*K + beta_i, d_i = gamma*K + delta_i, K*c_ij = alpha_ij.
  kSlowFast,
  /// b_i = beta_i, d_i = delta_i, K*c_ij = alpha_ij (gamma unused).
  kLogistic,
};

/// Jump rates towards z + e_i/K.
Vector3 birth_rates(const GenotypeState& z, const DemographicParams& p, std::int64_t K,
                    RateScaling scaling = RateScaling::kSlowFast);
/// Jump rates towards z - e_i/K, with the positive-part clamp on the
/// per-capita rate.
Vector3 death_rates(const GenotypeState& z, const DemographicParams& p, std::int64_t K,
                    RateScaling scaling = RateScaling::kSlowFast);

Vector3 birth_rates(const GenotypeCounts& z, const DemographicParams& p,
                    RateScaling scaling = RateScaling::kSlowFast);
Vector3 death_rates(const GenotypeCounts& z, const DemographicParams& p,
                    RateScaling scaling = RateScaling::kSlowFast);

NxyState to_nxy(const GenotypeState& z);
/// Inverse of to_nxy on n > 0, x in [0,1], -n*min(x^2,(1-x)^2) <= y <= n*x*(1-x).
GenotypeState from_nxy(const NxyState& s);
bool in_nxy_domain(double n, double x, double y, double tolerance = 1e-12);

/// Hardy-Weinberg deviation Y of a lattice state, 0 at extinction.
double hardy_weinberg_deviation(const GenotypeCounts& z);

/// Polar angle of s in [0, pi/sqrt(2)]; pi/2 on the s1 = 0 axis.
double s_angle(const SState& s);
SState to_s(double n, double x, double gamma);
SizeFrequency from_s(const SState& s, double gamma);

bool in_domain(const SState& s, double tolerance = 1e-12);
bool on_fixation_boundary_A(const SState& s, double tolerance = 1e-12);
bool on_fixation_boundary_a(const SState& s, double tolerance = 1e-12);
bool is_origin(const SState& s);

/// g(z) = sum_ij alpha_ij z_i z_j.
double g_value(const GenotypeState& z, const Matrix3& alpha);

enum class H1Method {
  /// One of the closed-form sufficient conditions fired.
  kSufficientCondition,
  /// Minimum of the quadratic form over a barycentric grid on the simplex.
  /// A heuristic: a positive grid minimum is evidence, not proof.
  kGridHeuristic,
};

enum class H1Condition { kAllPositive = 1, kPositiveRow = 2, kDominantProduct = 3, kDiscriminant = 4 };

struct H1Report {
  bool satisfied = false;
  bool symmetric = false;
  /// False when alpha is not symmetric: the sufficient conditions assume it.
  bool conditions_applicable = false;
  H1Method method = H1Method::kGridHeuristic;
  std::optional<H1Condition> condition;
  /// Distinguished index i of the condition that fired.
  int pivot = -1;
  /// Grid minimiser and minimum of f(p) = sum alpha_ij p_i p_j (grid method only).
  Vector3 grid_point{};
  double grid_minimum = 0.0;

  std::string describe() const;
};

H1Report validate_h1(const Matrix3& alpha, int grid_resolution = 200);

}  // namespace diploid
