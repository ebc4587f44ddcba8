#include "diploid/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "diploid/parallel.hpp"
#include "diploid/potential.hpp"
#include "diploid/stats.hpp"

namespace diploid {

namespace {

double root(double v) { return std::sqrt(std::max(v, 0.0)); }

void check_size_frequency(double n, double x) {
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("population size n must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("allele frequency x must lie in [0, 1]");
}

void require_neutral(const DemographicParams& p) {
  if (!p.neutral()) throw ValidationError("the haploid comparison model is neutral only");
}

// Competition felt by genotype i from Hardy-Weinberg partners, times n.
double competition(int i, double n, const Vector3& hw, const DemographicParams& p) {
  return n * (p.alpha[0][i] * hw[0] + p.alpha[1][i] * hw[1] + p.alpha[2][i] * hw[2]);
}

}  // namespace

Vector3 genotype_growth(double n, double x, const DemographicParams& p) {
  const Vector3 hw{x * x, 2.0 * x * (1.0 - x), (1.0 - x) * (1.0 - x)};
  Vector3 u;
  for (int i = 0; i < 3; ++i) u[i] = p.beta[i] - p.delta[i] - competition(i, n, hw, p);
  return u;
}

GrowthTerms growth_terms(double n, double x, const DemographicParams& p) {
  const Vector3 u = genotype_growth(n, x, p);
  const double mean =
      x * x * u[0] + 2.0 * x * (1.0 - x) * u[1] + (1.0 - x) * (1.0 - x) * u[2];
  const double selection = x * (u[0] - u[1]) + (1.0 - x) * (u[1] - u[2]);
  return {mean, selection};
}

Vector2 drift_na(double n_A, double n_a, const DemographicParams& p) {
  if (n_A < 0.0 || n_a < 0.0) throw ValidationError("allele counts must be nonnegative");
  const double total = n_A + n_a;
  if (total == 0.0) return {0.0, 0.0};
  const auto pressure = [&](int i) {
    return (p.alpha[0][i] * n_A * n_A + p.alpha[1][i] * 2.0 * n_A * n_a +
            p.alpha[2][i] * n_a * n_a) /
           (2.0 * total);
  };
  const double u1 = p.beta[0] - p.delta[0] - pressure(0);
  const double u2 = p.beta[1] - p.delta[1] - pressure(1);
  const double u3 = p.beta[2] - p.delta[2] - pressure(2);
  return {n_A / total * (u1 * n_A + u2 * n_a), n_a / total * (u3 * n_a + u2 * n_A)};
}

Matrix2 diffusion_na(double n_A, double n_a, double gamma) {
  if (n_A < 0.0 || n_a < 0.0) throw ValidationError("allele counts must be nonnegative");
  const double total = n_A + n_a;
  if (total == 0.0) return {};
  const double size_noise = root(4.0 * gamma / total);
  const double mixing = root(2.0 * gamma * n_A * n_a / total);
  return {{{size_noise * n_A, mixing}, {size_noise * n_a, -mixing}}};
}

Vector2 drift_nx(double n, double x, const DemographicParams& p) {
  check_size_frequency(n, x);
  const GrowthTerms g = growth_terms(n, x, p);
  return {n * g.mean, x * (1.0 - x) * g.selection};
}

Vector2 diffusion_nx(double n, double x, double gamma) {
  check_size_frequency(n, x);
  return {root(2.0 * gamma * n), root(gamma * x * (1.0 - x) / n)};
}

Vector2 drift_nx_haploid(double n, double x, const DemographicParams& p) {
  check_size_frequency(n, x);
  require_neutral(p);
  return {(p.beta[0] - p.delta[0] - p.alpha[0][0] * n) * n, 0.0};
}

Vector2 diffusion_nx_haploid(double n, double x, double gamma) {
  check_size_frequency(n, x);
  return {root(2.0 * gamma * n), root(2.0 * gamma * x * (1.0 - x) / n)};
}

std::string to_string(SdeKind kind) {
  switch (kind) {
    case SdeKind::kAlleleCounts: return "na";
    case SdeKind::kSizeFrequency: return "nx";
    case SdeKind::kKolmogorov: return "s";
    case SdeKind::kHaploid: return "haploid";
  }
  return "?";
}

SdeKind parse_sde_kind(const std::string& name) {
  if (name == "na") return SdeKind::kAlleleCounts;
  if (name == "nx") return SdeKind::kSizeFrequency;
  if (name == "s") return SdeKind::kKolmogorov;
  if (name == "haploid") return SdeKind::kHaploid;
  throw ValidationError("unknown SDE kind '" + name + "' (expected na, nx, s or haploid)");
}

std::string to_string(AbsorptionKind kind) {
  switch (kind) {
    case AbsorptionKind::kNone: return "none";
    case AbsorptionKind::kExtinction: return "extinction";
    case AbsorptionKind::kFixationA: return "fix_A";
    case AbsorptionKind::kFixationa: return "fix_a";
  }
  return "?";
}

void SdeOptions::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be nonnegative");
  if (!(eps_n >= 0.0)) throw ValidationError("eps_n must be nonnegative");
  if (!(eps_x >= 0.0 && eps_x < 0.5)) throw ValidationError("eps_x must lie in [0, 0.5)");
  if (record_stride == 0) throw ValidationError("record stride must be positive");
}

Vector2 initial_state(SdeKind kind, double n, double x, double gamma) {
  check_size_frequency(n, x);
  switch (kind) {
    case SdeKind::kAlleleCounts:
      return {2.0 * n * x, 2.0 * n * (1.0 - x)};
    case SdeKind::kKolmogorov: {
      const SState s = to_s(n, x, gamma);
      return {s.s1, s.s2};
    }
    case SdeKind::kSizeFrequency:
    case SdeKind::kHaploid:
      return {n, x};
  }
  return {n, x};
}

SizeFrequency to_size_frequency(SdeKind kind, const Vector2& state, double gamma) {
  switch (kind) {
    case SdeKind::kAlleleCounts: {
      const double total = state[0] + state[1];
      return {0.5 * total, total > 0.0 ? state[0] / total : 0.5};
    }
    case SdeKind::kKolmogorov: {
      const SState s{state[0], state[1]};
      if (is_origin(s)) return {0.0, 0.5};
      const double x = 0.5 * (1.0 + std::cos(std::numbers::sqrt2 * s_angle(s)));
      return {0.5 * gamma * s.radius_squared(), std::clamp(x, 0.0, 1.0)};
    }
    case SdeKind::kSizeFrequency:
    case SdeKind::kHaploid:
      return {state[0], state[1]};
  }
  return {state[0], state[1]};
}

namespace {

double snap_frequency(double x, double eps_x) {
  x = std::clamp(x, 0.0, 1.0);
  if (x <= eps_x) return 0.0;
  if (x >= 1.0 - eps_x) return 1.0;
  return x;
}

// Euler-Maruyama for (n, x) with the x-variance scaled by `noise_factor`
// (1 diploid, 2 haploid).
SizeFrequency step_frequency(const SizeFrequency& state, const DemographicParams& p, double dt,
                             double g1, double g2, double eps_x, double noise_factor) {
  const double n = state.n;
  const double x = state.x;
  if (!(n > 0.0)) return state;
  const double sqrt_dt = std::sqrt(dt);
  const GrowthTerms g = growth_terms(n, x, p);
  const double n_next = n + n * g.mean * dt + root(2.0 * p.gamma * n) * sqrt_dt * g1;
  const double x_next = x + x * (1.0 - x) * g.selection * dt +
                        root(noise_factor * p.gamma * x * (1.0 - x) / n) * sqrt_dt * g2;
  return {std::max(n_next, 0.0), snap_frequency(x_next, eps_x)};
}

// Projects a point that left the Kolmogorov domain onto the nearer boundary ray.
SState project_to_domain(const SState& s) {
  const double raw = std::atan2(s.s2, s.s1);
  if (raw >= 0.0 && raw <= kMaxAngle) return s;
  const double r = std::sqrt(s.radius_squared());
  // The excluded sector is (kMaxAngle, 2 pi); its bisector decides the ray.
  const double bisector = 0.5 * (kMaxAngle + 2.0 * std::numbers::pi) - 2.0 * std::numbers::pi;
  if (raw < 0.0 && raw > bisector) return {r, 0.0};
  return {r * std::cos(kMaxAngle), r * std::sin(kMaxAngle)};
}

}  // namespace

SizeFrequency step_nx(const SizeFrequency& state, const DemographicParams& p, double dt,
                      double g1, double g2, double eps_x) {
  return step_frequency(state, p, dt, g1, g2, eps_x, 1.0);
}

SdePath simulate_sde(SdeKind kind, const Vector2& initial, const DemographicParams& p,
                     const SdeOptions& options, std::uint64_t seed, std::uint64_t stream) {
  options.validate();
  p.validate();
  if (kind == SdeKind::kHaploid) require_neutral(p);
  switch (kind) {
    case SdeKind::kAlleleCounts:
      if (!(initial[0] >= 0.0 && initial[1] >= 0.0)) {
        throw ValidationError("initial allele counts must be nonnegative");
      }
      break;
    case SdeKind::kSizeFrequency:
    case SdeKind::kHaploid:
      if (!(initial[0] >= 0.0) || !(initial[1] >= 0.0 && initial[1] <= 1.0)) {
        throw ValidationError("initial state needs n >= 0 and x in [0, 1]");
      }
      break;
    case SdeKind::kKolmogorov:
      if (!in_domain({initial[0], initial[1]})) {
        throw ValidationError("initial point lies outside the Kolmogorov domain");
      }
      break;
  }

  SdePath path;
  path.kind = kind;
  const double eps_x = options.eps_x;
  const bool stop_at_fixation = options.stop_at_fixation || kind == SdeKind::kKolmogorov;
  Vector2 state = initial;
  if (kind == SdeKind::kSizeFrequency || kind == SdeKind::kHaploid) {
    state[1] = snap_frequency(state[1], eps_x);
  }

  auto record = [&](double t) {
    path.times.push_back(t);
    path.states.push_back(state);
  };
  // Returns true when the path must stop at time t.
  auto check_absorption = [&](double t) {
    const SizeFrequency nx = to_size_frequency(kind, state, p.gamma);
    if (nx.n <= options.eps_n) {
      path.absorption = {AbsorptionKind::kExtinction, t};
      return true;
    }
    if (!path.fixation && (nx.x <= eps_x || nx.x >= 1.0 - eps_x)) {
      path.fixation = Absorption{nx.x >= 1.0 - eps_x ? AbsorptionKind::kFixationA
                                                     : AbsorptionKind::kFixationa,
                                 t};
      if (stop_at_fixation) {
        path.absorption = *path.fixation;
        return true;
      }
    }
    return false;
  };

  record(0.0);
  if (check_absorption(0.0)) return path;

  RandomStream rng(seed, stream);
  const auto steps = static_cast<std::size_t>(std::ceil(options.t_end / options.dt - 1e-9));
  const double h = steps > 0 ? options.t_end / static_cast<double>(steps) : 0.0;
  const double sqrt_h = std::sqrt(h);

  for (std::size_t i = 1; i <= steps; ++i) {
    const double g1 = rng.gaussian();
    const double g2 = rng.gaussian();
    switch (kind) {
      case SdeKind::kAlleleCounts: {
        const Vector2 drift = drift_na(state[0], state[1], p);
        const Matrix2 sigma = diffusion_na(state[0], state[1], p.gamma);
        Vector2 next;
        for (int c = 0; c < 2; ++c) {
          next[c] = state[c] + drift[c] * h + (sigma[c][0] * g1 + sigma[c][1] * g2) * sqrt_h;
          next[c] = std::max(next[c], 0.0);
        }
        // Snap to fixation keeping the total allele mass.
        const double total = next[0] + next[1];
        if (total > 0.0) {
          const double x = next[0] / total;
          if (x <= eps_x) next = {0.0, total};
          if (x >= 1.0 - eps_x) next = {total, 0.0};
        }
        state = next;
        break;
      }
      case SdeKind::kSizeFrequency:
      case SdeKind::kHaploid: {
        const SizeFrequency next = step_frequency({state[0], state[1]}, p, h, g1, g2, eps_x,
                                                  kind == SdeKind::kHaploid ? 2.0 : 1.0);
        state = {next.n, next.x};
        break;
      }
      case SdeKind::kKolmogorov: {
        const Vector2 q = s_drift({state[0], state[1]}, p);
        SState next{state[0] - q[0] * h + sqrt_h * g1, state[1] - q[1] * h + sqrt_h * g2};
        next = project_to_domain(next);
        // Snap to the boundary ray when x is within eps_x of 0 or 1.
        const SizeFrequency nx = to_size_frequency(kind, {next.s1, next.s2}, p.gamma);
        if (nx.n > 0.0 && (nx.x <= eps_x || nx.x >= 1.0 - eps_x)) {
          const double r = std::sqrt(next.radius_squared());
          const double angle = nx.x >= 1.0 - eps_x ? 0.0 : kMaxAngle;
          next = {r * std::cos(angle), r * std::sin(angle)};
        }
        state = {next.s1, next.s2};
        break;
      }
    }
    const double t = i == steps ? options.t_end : static_cast<double>(i) * h;
    if (check_absorption(t)) {
      record(t);
      return path;
    }
    if (i % options.record_stride == 0 || i == steps) record(t);
  }
  return path;
}

FixationEstimate fixation_experiment(const DemographicParams& p, double n0, double x0,
                                     std::size_t paths, const SdeOptions& options,
                                     std::uint64_t seed, std::size_t threads) {
  if (paths < 2) throw ValidationError("at least two paths are required");
  SdeOptions run = options;
  run.stop_at_fixation = true;
  run.record_stride = std::numeric_limits<std::size_t>::max();
  const Vector2 start = initial_state(SdeKind::kSizeFrequency, n0, x0, p.gamma);
  std::vector<AbsorptionKind> outcome(paths);
  parallel_for(paths, threads, [&](std::size_t i) {
    outcome[i] = simulate_sde(SdeKind::kSizeFrequency, start, p, run, seed, i).absorption.kind;
  });

  FixationEstimate est;
  est.paths = paths;
  for (AbsorptionKind k : outcome) {
    switch (k) {
      case AbsorptionKind::kFixationA: ++est.fixed_A; break;
      case AbsorptionKind::kFixationa: ++est.fixed_a; break;
      case AbsorptionKind::kExtinction: ++est.extinct_first; break;
      case AbsorptionKind::kNone: ++est.unresolved; break;
    }
  }
  const double m = static_cast<double>(paths);
  est.probability_A = static_cast<double>(est.fixed_A) / m;
  est.standard_error = std::sqrt(est.probability_A * (1.0 - est.probability_A) / m);
  return est;
}

ExtinctionEstimate extinction_experiment(const DemographicParams& p, double n0, double x0,
                                         std::size_t paths, const SdeOptions& options,
                                         std::uint64_t seed, std::size_t threads) {
  if (paths < 1) throw ValidationError("at least one path is required");
  SdeOptions run = options;
  run.stop_at_fixation = false;
  run.record_stride = std::numeric_limits<std::size_t>::max();
  const Vector2 start = initial_state(SdeKind::kAlleleCounts, n0, x0, p.gamma);
  std::vector<Absorption> outcome(paths);
  parallel_for(paths, threads, [&](std::size_t i) {
    outcome[i] = simulate_sde(SdeKind::kAlleleCounts, start, p, run, seed, i).absorption;
  });

  ExtinctionEstimate est;
  est.paths = paths;
  RunningStats times;
  for (const auto& a : outcome) {
    if (a.kind != AbsorptionKind::kExtinction) continue;
    ++est.extinct;
    times.add(a.time);
  }
  est.fraction = static_cast<double>(est.extinct) / static_cast<double>(paths);
  est.mean_extinction_time = times.mean();
  return est;
}

QuadraticVariationReport quadratic_variation_ratio(const DemographicParams& p, double n, double x,
                                                   double dt, std::size_t steps,
                                                   std::uint64_t seed) {
  check_size_frequency(n, x);
  require_neutral(p);
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (steps == 0) throw ValidationError("steps must be positive");
  RandomStream diploid_rng(seed, 0);
  RandomStream haploid_rng(seed, 1);
  QuadraticVariationReport report;
  report.steps = steps;
  for (std::size_t i = 0; i < steps; ++i) {
    const SizeFrequency d = step_frequency({n, x}, p, dt, diploid_rng.gaussian(),
                                           diploid_rng.gaussian(), 0.0, 1.0);
    const SizeFrequency h = step_frequency({n, x}, p, dt, haploid_rng.gaussian(),
                                           haploid_rng.gaussian(), 0.0, 2.0);
    report.diploid += (d.x - x) * (d.x - x);
    report.haploid += (h.x - x) * (h.x - x);
  }
  const double total_time = dt * static_cast<double>(steps);
  report.diploid /= total_time;
  report.haploid /= total_time;
  report.ratio = report.diploid / report.haploid;
  return report;
}

}  // namespace diploid
