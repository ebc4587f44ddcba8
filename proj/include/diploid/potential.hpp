#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diploid/diffusion.hpp"
#include "diploid/model.hpp"

namespace diploid {

/// Drift q of the Kolmogorov coordinates, dS = dW - q(S) dt, obtained from
/// the (N, X) diffusion by Ito's formula. Valid for any alpha; for symmetric
/// alpha it equals grad Q. Requires s in the interior of the domain.
Vector2 s_drift(const SState& s, const DemographicParams& p);

/// q for symmetric alpha; dispatches to the neutral closed form when the
/// parameters are neutral. Throws ValidationError for non-symmetric alpha.
Vector2 q_drift(const SState& s, const DemographicParams& p);
/// q through the (U, V, W, n, x) decomposition. Symmetric alpha required.
Vector2 q_drift_general(const SState& s, const DemographicParams& p);
/// Closed-form q of the neutral model. Neutral parameters required.
Vector2 q_drift_neutral(const SState& s, const DemographicParams& p);
/// The expanded first component of q in powers of h = cos(sqrt2 theta),
/// valid for s1 >= 0. Symmetric alpha required.
double q1_expanded(const SState& s, const DemographicParams& p);

/// Potential Q with grad Q = q (symmetric alpha); the additive constant is
/// fixed by Q = ln r + (1/2) ln sin(sqrt2 theta) + polynomial terms in r^2.
double potential_Q(const SState& s, const DemographicParams& p);
double potential_Q_neutral(const SState& s, const DemographicParams& p);

/// Central-difference gradient of potential_Q.
Vector2 potential_gradient_fd(const SState& s, const DemographicParams& p, double h = 1e-5);

/// F = |q|^2 - div q with the divergence by central differences.
double f_functional(const SState& s, const DemographicParams& p, double h = 1e-5);
/// Closed form of F in the neutral model.
double f_neutral_closed(const SState& s, const DemographicParams& p);

struct DriftCheckReport {
  /// max over the sample of |q - grad_fd Q| (infinity norm); empty when Q
  /// does not exist (non-symmetric alpha).
  std::optional<double> max_gradient_residual;
  /// max over the sample of |dq1/ds2 - dq2/ds1|.
  double max_cross_partial_residual = 0.0;
  std::size_t sample_size = 0;
  std::string sample_description;
};

/// Random interior points with radius in [r_min, r_max] and angle at least
/// `angle_margin` away from both boundary rays.
std::vector<SState> sample_interior(std::size_t count, std::uint64_t seed, double r_min = 0.5,
                                    double r_max = 6.0, double angle_margin = 0.1);

/// Gradient and cross-partial residuals of q over `sample`.
DriftCheckReport drift_check(const DemographicParams& p, const std::vector<SState>& sample,
                             double h = 1e-5);
/// Cross-partial residual only; works for any alpha.
DriftCheckReport cross_partial_residual(const DemographicParams& p,
                                        const std::vector<SState>& sample, double h = 1e-5);

}  // namespace diploid
