#pragma once

#include <vector>

#include "nlgauge/dynamics.hpp"
#include "nlgauge/gauge.hpp"

namespace nlgauge {

/// Coefficients of the equation obeyed by N_(gamma, lambda, 0)[psi] when psi
/// solves the linear equation i d_t psi = (nu1 Laplacian + mu0 V) psi.
/// Throws std::invalid_argument for lambda = 0.
NLSECoefficients push_forward_linear(double gamma, double lambda, double nu1, double mu0);

/// Coefficients c' such that psi' = N_g[psi] solves the family equation with
/// c' whenever psi solves it with c.
///
/// Writing psi = R exp(iS), the family splits into a continuity equation for
/// rho = R^2 and a phase equation, both linear in the quantities
/// Laplacian S, Laplacian rho / rho, |grad S|^2, grad S . grad rho / rho and
/// |grad rho|^2 / rho^2. The transform S' = gamma ln R + lambda S is a linear
/// change of these quantities; re-collecting terms gives
///   nu1' = nu1 / l                    nu2' = nu2 - g nu1 / (2 l)
///   mu0' = l mu0                      mu1' = l mu1 + g / 2
///   mu2' = l mu2 - g nu2 + g nu1 mu1 + (nu1 / 2)(l + (g^2 - 1) / l)
///   mu3' = l mu3                      mu4' = l mu4 - g / 2 + 2 g nu1 mu3
///   mu5' = l mu5 + g nu1 mu4 + g^2 nu1^2 mu3 / l - (nu1 / 4)(l + (g^2 - 1) / l)
///   alpha1' = l alpha1 - g alpha2 / 2   alpha2' = alpha2
/// with g = gamma and l = lambda. nu2 + nu1 mu1 is invariant.
///
/// Only constant gamma, lambda and theta = 0 are supported; throws
/// std::invalid_argument otherwise.
NLSECoefficients push_forward_family(const GaugeTransform& g, const NLSECoefficients& c);

/// Whether c is the image of a linear equation under some gauge with
/// theta = 0: mu3 = alpha1 = alpha2 = 0, mu4 = -mu1, mu2 = -2 mu5,
/// nu2 = -nu1 mu1, and 2 mu2 / nu1 + 1 - 4 mu1^2 > 0 (the squared lambda of
/// the preimage). Comparisons use the absolute tolerance `tol`.
bool in_linearizable_family(const NLSECoefficients& c, double tol = 1e-12);

struct EquivalenceReport {
  /// sup over frames of ||gauge(evolve(c, psi0)) - evolve(c', gauge(psi0))||_2.
  double residual_sup = 0.0;
  std::vector<SeriesPoint> residual_series;
  /// Same supremum with dt halved.
  double refined_residual_sup = 0.0;
  /// log2(residual_sup / refined_residual_sup); NaN when both are at rounding
  /// level.
  double refinement_order = 0.0;
  /// sup over frames of max |rho_A - rho_B|.
  double density_sup = 0.0;
  /// Largest fraction of floored density points seen on either path. Nonzero
  /// values mean the phase map was evaluated near nodes.
  double max_regularized_fraction = 0.0;

  bool near_node() const { return max_regularized_fraction > 0.0; }
};

/// One pass of the commuting diagram at a fixed dt.
struct CommutingRun {
  std::vector<SeriesPoint> residual;
  double density_sup = 0.0;
  double max_regularized_fraction = 0.0;
};

/// Runs both paths of the gauge commuting diagram once at config.dt with the
/// given target coefficients for path B.
CommutingRun commuting_run(const GaugeTransform& g, const NLSECoefficients& c,
                           const NLSECoefficients& pushed, const ComplexField& psi0,
                           const Potential& v, const SimulationConfig& config);

/// Path A gauges each frame of evolve(c, psi0); path B evolves
/// push_forward_family(g, c) from the gauged initial state. Both use the RK4
/// integrator, so the identity gauge reproduces path A exactly. The run is
/// repeated with dt/2 (and doubled output cadence) for the refinement order.
EquivalenceReport commuting_residual(const GaugeTransform& g, const NLSECoefficients& c,
                                     const ComplexField& psi0, const Potential& v,
                                     const SimulationConfig& config);

/// Same as commuting_residual but with an explicit (possibly wrong) path B
/// coefficient set, for negative controls.
EquivalenceReport commuting_residual_with(const GaugeTransform& g, const NLSECoefficients& c,
                                          const NLSECoefficients& pushed,
                                          const ComplexField& psi0, const Potential& v,
                                          const SimulationConfig& config);

}  // namespace nlgauge
