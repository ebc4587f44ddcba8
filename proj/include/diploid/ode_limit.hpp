#pragma once

#include <vector>

#include "diploid/model.hpp"

namespace diploid {

/// Constants of the deterministic limit: per-capita birth beta, death delta
/// and competition alpha, all genotype independent.
struct OdeParams {
  double beta = 1.0;
  double delta = 0.0;
  double alpha = 0.0;

  /// Throws ValidationError unless beta > 0 and delta, alpha >= 0.
  void validate() const;
};

/// Below this |beta - delta| the logistic solution switches to the beta = delta form.
inline constexpr double kLogisticBranchThreshold = 1e-10;

/// Population size N_t of dN/dt = (beta - delta - alpha N) N.
double n_closed(double t, double n0, const OdeParams& p);
/// Allele frequency X_t, which is constant along the flow.
double x_closed(double t, double x0);
/// Hardy-Weinberg deviation Y_t of dY/dt = -(delta + alpha N) Y.
double y_closed(double t, double y0, double n0, const OdeParams& p);

enum class YBranch { kNoCompetition, kCriticalGrowth, kEquilibrium, kGeneral };
/// Which closed-form branch y_closed uses for these inputs.
YBranch y_branch(double n0, const OdeParams& p);

struct OdeSolution {
  std::vector<double> times;
  std::vector<GenotypeState> states;
};

/// Fixed-step classical Runge-Kutta for the genotype system. The step is
/// t_end / ceil(t_end / dt); every `stride`-th step is stored, plus the
/// final one. Throws SimulationError if a component drops below -1e-12.
OdeSolution integrate_ode(const GenotypeState& z0, const OdeParams& p, double t_end,
                          double dt = 1e-3, std::size_t stride = 1);

/// Right-hand side lambda(z) - mu(z) of the genotype system.
Vector3 ode_rhs(const GenotypeState& z, const OdeParams& p);

}  // namespace diploid
