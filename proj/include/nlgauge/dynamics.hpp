#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "nlgauge/functionals.hpp"
#include "nlgauge/grid.hpp"

namespace nlgauge {

/// Coefficients of
///   i d_t psi = (nu1 Laplacian + mu0 V) psi + i nu2 R2 psi + sum_j mu_j R_j psi
///               + alpha1 log|psi|^2 psi + alpha2 (arg psi) psi
/// in units with hbar = 1. Each R_j enters as a real multiplier of psi.
struct NLSECoefficients {
  double nu1 = -0.5;
  double nu2 = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
  double mu4 = 0.0;
  double mu5 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  static constexpr std::array<std::string_view, 10> names{
      "nu1", "nu2", "mu0", "mu1", "mu2", "mu3", "mu4", "mu5", "alpha1", "alpha2"};

  /// Free particle of unit mass with potential weight mu0.
  static NLSECoefficients linear(double nu1 = -0.5, double mu0 = 0.0);

  std::array<double, 10> as_array() const;
  static NLSECoefficients from_array(const std::array<double, 10>& values);

  /// True when every nonlinear coefficient is zero.
  bool linear_case() const;
  void validate() const;

  bool operator==(const NLSECoefficients&) const = default;
};

/// Largest absolute coefficient difference.
double max_difference(const NLSECoefficients& a, const NLSECoefficients& b);

struct Potential {
  RealField values;

  static Potential zero(const Grid& grid) { return {RealField(grid)}; }
  bool is_zero() const;
};

/// Largest of |nu1|, |nu2| and |r|, where r k^2 ranges over the eigenvalues
/// of the family linearized about a uniform state. The last term is gauge
/// invariant and equals |nu1| of the linear preimage for gauged linear
/// equations, whose own nu1 can be much smaller.
double effective_diffusivity(const NLSECoefficients& c);

struct SimulationConfig {
  double dt = 1e-4;
  double t_final = 1.0;
  int output_every = 1;
  RegularizationPolicy policy{};
  /// Skip the explicit-scheme time step bound.
  bool force_dt = false;

  /// 0.2 dx^2 / max(effective_diffusivity(c), dx^2).
  static double stability_bound(const Grid& grid, const NLSECoefficients& c);
  /// Throws ConfigError on non-positive dt/t_final, output_every < 1, or dt
  /// above the stability bound without force_dt.
  void validate(const Grid& grid, const NLSECoefficients& c) const;
  /// Number of steps needed to reach t_final.
  int step_count() const;
};

struct Frame {
  double t = 0.0;
  ComplexField psi;
  double norm = 0.0;
  double regularized_fraction = 0.0;
  /// Time-continuous unwrapped phase at grid index 0.
  double phase_anchor = 0.0;
};

struct Trajectory {
  std::vector<Frame> frames;

  const Frame& final() const { return frames.back(); }
  /// max |norm^2 - initial norm^2| over frames.
  double max_norm_drift() const;
  double max_regularized_fraction() const;
};

/// One sample of a scalar time series.
struct SeriesPoint {
  double t = 0.0;
  double value = 0.0;
};

struct RhsDiagnostics {
  double regularized_fraction = 0.0;
};

/// Time derivative d_t psi of the family member `c`.
///
/// `phase_anchor` selects the branch of the unwrapped phase used by the
/// alpha2 term (see modulus_phase).
ComplexField rhs(const NLSECoefficients& c, const Potential& v, const ComplexField& psi,
                 const RegularizationPolicy& policy,
                 std::optional<double> phase_anchor = std::nullopt,
                 RhsDiagnostics* diagnostics = nullptr);

/// One classical four-stage Runge-Kutta step. Throws NumericalError if the
/// result has non-finite entries.
ComplexField step_rk4(const NLSECoefficients& c, const Potential& v, const ComplexField& psi,
                      double dt, const RegularizationPolicy& policy,
                      std::optional<double> phase_anchor = std::nullopt);

/// Integrates with RK4 to config.t_final, recording frames at t = 0, every
/// config.output_every steps, and at t_final.
///
/// Requires a normalized psi0 (within 1e-10). Throws NumericalError on
/// non-finite values or when the squared norm drifts by more than 1e-3.
Trajectory evolve(const NLSECoefficients& c, const Potential& v, const ComplexField& psi0,
                  const SimulationConfig& config,
                  std::optional<double> phase_anchor = std::nullopt);

/// Reference solution of the linear equation i d_t psi = (nu1 Laplacian +
/// mu0 V) psi with the same frame cadence as evolve.
///
/// For V = 0 each frame is the exact Fourier propagator applied to psi0.
/// Otherwise Strang splitting is used: half potential phase, exact kinetic
/// phase, half potential phase.
Trajectory evolve_linear_exact(double nu1, double mu0, const Potential& v,
                               const ComplexField& psi0, const SimulationConfig& config,
                               std::optional<double> phase_anchor = std::nullopt);

/// L2 norm of the balance law residual
///   (rho(t+h) - rho(t-h)) / 2h - (-div J + 2 nu2 Laplacian rho)
/// evaluated at the middle state.
double continuity_residual(const NLSECoefficients& c, const ComplexField& before,
                           const ComplexField& middle, const ComplexField& after, double h);

}  // namespace nlgauge
