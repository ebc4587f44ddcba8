#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diploid/model.hpp"
#include "diploid/random.hpp"

namespace diploid {

using Vector2 = std::array<double, 2>;
/// Row = state component, column = Brownian motion.
using Matrix2 = std::array<Vector2, 2>;

/// Per-genotype growth rates beta_i - delta_i - n * sum_j alpha_ji p_j(x)
/// with Hardy-Weinberg proportions p(x) = (x^2, 2x(1-x), (1-x)^2).
Vector3 genotype_growth(double n, double x, const DemographicParams& p);
/// Mean growth M = sum_i p_i(x) U_i and selection term G = x(U-V) + (1-x)(V-W).
struct GrowthTerms {
  double mean = 0.0;
  double selection = 0.0;
};
GrowthTerms growth_terms(double n, double x, const DemographicParams& p);

/// Drift of the allele-count diffusion (N^A, N^a); zero at (0, 0).
Vector2 drift_na(double n_A, double n_a, const DemographicParams& p);
/// Diffusion matrix of (N^A, N^a); zero at (0, 0).
Matrix2 diffusion_na(double n_A, double n_a, double gamma);

/// Drift (n M, x(1-x) G) of the (N, X) diffusion.
Vector2 drift_nx(double n, double x, const DemographicParams& p);
/// Diagonal noise (sqrt(2 gamma n), sqrt(gamma x(1-x)/n)).
Vector2 diffusion_nx(double n, double x, double gamma);

/// Haploid neutral Lotka-Volterra diffusion in (N^h, X^h) coordinates.
/// Requires neutral parameters.
Vector2 drift_nx_haploid(double n, double x, const DemographicParams& p);
/// Diagonal noise (sqrt(2 gamma n), sqrt(2 gamma x(1-x)/n)).
Vector2 diffusion_nx_haploid(double n, double x, double gamma);

enum class SdeKind {
  /// Allele counts (n_A, n_a).
  kAlleleCounts,
  /// Population size and allele frequency (n, x).
  kSizeFrequency,
  /// Kolmogorov coordinates (s1, s2), driven by the drift -q.
  kKolmogorov,
  /// Haploid neutral comparison model in (n, x).
  kHaploid,
};

std::string to_string(SdeKind kind);
/// Parses "na", "nx", "s" or "haploid".
SdeKind parse_sde_kind(const std::string& name);

enum class AbsorptionKind { kNone, kExtinction, kFixationA, kFixationa };

std::string to_string(AbsorptionKind kind);

struct Absorption {
  AbsorptionKind kind = AbsorptionKind::kNone;
  double time = 0.0;
};

struct SdeOptions {
  double dt = 1e-3;
  double t_end = 1.0;
  /// Extinction threshold on n.
  double eps_n = 1e-4;
  /// Fixation threshold on x and 1 - x.
  double eps_x = 1e-4;
  /// Freeze the path when an allele fixes. Kolmogorov paths always stop
  /// there because q is singular on the boundary.
  bool stop_at_fixation = false;
  /// Store every `record_stride`-th step (the final state is always stored).
  std::size_t record_stride = 1;

  void validate() const;
};

struct SdePath {
  SdeKind kind = SdeKind::kSizeFrequency;
  std::vector<double> times;
  std::vector<Vector2> states;
  /// First absorbing event: extinction, or fixation when the path stops there.
  Absorption absorption;
  /// First fixation event, recorded even when the path keeps running.
  std::optional<Absorption> fixation;
};

/// Converts an initial (n, x) into the coordinates of `kind`.
Vector2 initial_state(SdeKind kind, double n, double x, double gamma);
/// Converts a state of `kind` back to (n, x). x is 0.5 at extinction by convention.
SizeFrequency to_size_frequency(SdeKind kind, const Vector2& state, double gamma);

/// Euler-Maruyama with full truncation under the clamp and threshold policy,
/// driven by the random stream (seed, stream).
SdePath simulate_sde(SdeKind kind, const Vector2& initial, const DemographicParams& p,
                     const SdeOptions& options, std::uint64_t seed, std::uint64_t stream = 0);

/// One Euler-Maruyama step of the (n, x) diffusion driven by normals (g1, g2),
/// clamped to n >= 0 and x in [0, 1] and snapped to 0 or 1 within eps_x.
/// Shared with the particle system.
SizeFrequency step_nx(const SizeFrequency& state, const DemographicParams& p, double dt,
                      double g1, double g2, double eps_x);

struct FixationEstimate {
  std::size_t paths = 0;
  std::size_t fixed_A = 0;
  std::size_t fixed_a = 0;
  std::size_t extinct_first = 0;
  std::size_t unresolved = 0;
  double probability_A = 0.0;
  double standard_error = 0.0;
};

/// Fraction of (n, x) paths that fix allele A, run until fixation, extinction
/// or t_end.
FixationEstimate fixation_experiment(const DemographicParams& p, double n0, double x0,
                                     std::size_t paths, const SdeOptions& options,
                                     std::uint64_t seed, std::size_t threads = 1);

struct ExtinctionEstimate {
  std::size_t paths = 0;
  std::size_t extinct = 0;
  double fraction = 0.0;
  double mean_extinction_time = 0.0;
};

/// Fraction of (n_A, n_a) paths whose size falls below eps_n by t_end.
ExtinctionEstimate extinction_experiment(const DemographicParams& p, double n0, double x0,
                                         std::size_t paths, const SdeOptions& options,
                                         std::uint64_t seed, std::size_t threads = 1);

struct QuadraticVariationReport {
  double diploid = 0.0;
  double haploid = 0.0;
  double ratio = 0.0;
  std::size_t steps = 0;
};

/// Realized variance of one-step increments of X from the fixed state
/// (n, x), for the diploid and the haploid scheme. Neutral parameters.
QuadraticVariationReport quadratic_variation_ratio(const DemographicParams& p, double n, double x,
                                                   double dt, std::size_t steps,
                                                   std::uint64_t seed);

}  // namespace diploid
