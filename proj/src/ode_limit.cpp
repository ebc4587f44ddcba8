#include "diploid/ode_limit.hpp"

#include <cmath>

namespace diploid {

void OdeParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be positive");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be nonnegative");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be nonnegative");
}

namespace {

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("t must be nonnegative and finite");
}

bool critical(const OdeParams& p) { return std::abs(p.beta - p.delta) < kLogisticBranchThreshold; }

}  // namespace

double n_closed(double t, double n0, const OdeParams& p) {
  p.validate();
  check_time(t);
  if (!(n0 > 0.0)) throw ValidationError("n0 must be positive");
  if (critical(p)) return n0 / (p.alpha * n0 * t + 1.0);
  const double r = p.beta - p.delta;
  // expm1 keeps (e^{rt} - 1) accurate for small r*t.
  const double growth = std::expm1(r * t);
  return r * n0 * (growth + 1.0) / (r + p.alpha * n0 * growth);
}

double x_closed(double t, double x0) {
  check_time(t);
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw ValidationError("x0 must lie in [0, 1]");
  return x0;
}

YBranch y_branch(double n0, const OdeParams& p) {
  if (p.alpha == 0.0) return YBranch::kNoCompetition;
  if (critical(p)) return YBranch::kCriticalGrowth;
  if (n0 == (p.beta - p.delta) / p.alpha) return YBranch::kEquilibrium;
  return YBranch::kGeneral;
}

double y_closed(double t, double y0, double n0, const OdeParams& p) {
  p.validate();
  check_time(t);
  if (!(n0 > 0.0)) throw ValidationError("n0 must be positive");
  const double decay = std::exp(-p.delta * t);
  switch (y_branch(n0, p)) {
    case YBranch::kNoCompetition:
      return y0 * decay;
    case YBranch::kCriticalGrowth:
      return y0 * decay / (1.0 + p.alpha * n0 * t);
    case YBranch::kEquilibrium:
      return y0 * std::exp(-p.beta * t);
    case YBranch::kGeneral: {
      // Y_t = Y0 exp(-delta t - alpha int_0^t N) with the logistic N in closed form.
      const double r = p.beta - p.delta;
      const double denominator = r + p.alpha * n0 * std::expm1(r * t);
      const double constant = y0 / (1.0 - p.alpha * n0 / r);
      return constant * decay * (1.0 - p.alpha * n0 * std::exp(r * t) / denominator);
    }
  }
  return y0;
}

Vector3 ode_rhs(const GenotypeState& z, const OdeParams& p) {
  const double n = z.n();
  if (n <= 0.0) return {0.0, 0.0, 0.0};
  const double big = z.z1 + 0.5 * z.z2;
  const double small = z.z3 + 0.5 * z.z2;
  const double death = p.delta + p.alpha * n;
  return {p.beta * big * big / n - death * z.z1, p.beta * 2.0 * big * small / n - death * z.z2,
          p.beta * small * small / n - death * z.z3};
}

OdeSolution integrate_ode(const GenotypeState& z0, const OdeParams& p, double t_end, double dt,
                          std::size_t stride) {
  p.validate();
  check_time(t_end);
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (stride == 0) throw ValidationError("stride must be positive");
  if (z0.z1 < 0.0 || z0.z2 < 0.0 || z0.z3 < 0.0) {
    throw ValidationError("initial masses must be nonnegative");
  }

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
  auto add = [](const GenotypeState& z, const Vector3& k, double w) {
    return GenotypeState{z.z1 + w * k[0], z.z2 + w * k[1], z.z3 + w * k[2]};
  };

  OdeSolution out;
  out.times.push_back(0.0);
  out.states.push_back(z0);
  GenotypeState z = z0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const Vector3 k1 = ode_rhs(z, p);
    const Vector3 k2 = ode_rhs(add(z, k1, 0.5 * h), p);
    const Vector3 k3 = ode_rhs(add(z, k2, 0.5 * h), p);
    const Vector3 k4 = ode_rhs(add(z, k3, h), p);
    Vector3 increment;
    for (int c = 0; c < 3; ++c) increment[c] = (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
    z = add(z, increment, h);
    if (z.z1 < -1e-12 || z.z2 < -1e-12 || z.z3 < -1e-12 || !std::isfinite(z.n())) {
      throw SimulationError("integration left the nonnegative orthant at t = " +
                            std::to_string(static_cast<double>(i) * h) + "; reduce dt");
    }
    if (i % stride == 0 || i == steps) {
      out.times.push_back(i == steps ? t_end : static_cast<double>(i) * h);
      out.states.push_back(z);
    }
  }
  return out;
}

}  // namespace diploid
