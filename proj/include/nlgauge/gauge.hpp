#pragma once

#include <optional>
#include <variant>

#include "nlgauge/functionals.hpp"
#include "nlgauge/grid.hpp"

namespace nlgauge {

/// Position-dependent phase theta(m): either a constant or a field.
class PositionPhase {
 public:
  PositionPhase() = default;
  PositionPhase(double constant);  // NOLINT(google-explicit-constructor)
  explicit PositionPhase(RealField field);

  bool is_constant() const { return std::holds_alternative<double>(value_); }
  bool is_zero() const;
  double at(std::size_t i) const;

  PositionPhase scaled(double factor) const;
  PositionPhase plus(const PositionPhase& other) const;

  /// Largest absolute difference to `other` over the grid (constants compare
  /// as constants).
  double max_difference(const PositionPhase& other) const;

 private:
  std::variant<double, RealField> value_ = 0.0;
};

/// Nonlinear gauge transformation
///   N[psi] = R exp(i (gamma ln R + lambda S + theta)),   R = |psi|, S = arg psi.
///
/// The parameters describe one fixed time slice; time-dependent schedules are
/// built by constructing one transform per slice.
class GaugeTransform {
 public:
  /// Throws std::invalid_argument if lambda is zero or any parameter is not
  /// finite.
  GaugeTransform(double gamma, double lambda, PositionPhase theta = 0.0);

  static GaugeTransform identity() { return {0.0, 1.0}; }

  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  const PositionPhase& theta() const { return theta_; }

 private:
  double gamma_;
  double lambda_;
  PositionPhase theta_;
};

struct GaugedField {
  ComplexField field;
  /// Unwrapped output phase at index 0: gamma ln R0 + lambda S0 + theta0.
  /// Passing it on as the anchor of a later application keeps the phase
  /// branch consistent across repeated transforms.
  double phase_anchor = 0.0;
  std::size_t regularized_points = 0;

  bool warning() const { return regularized_points > 0; }
};

/// Applies the transform. ln R is evaluated as ln max(R, sqrt(eps)); the
/// modulus is copied through unchanged so |N[psi]| = |psi| at every point.
GaugedField apply_gauge(const GaugeTransform& g, const ComplexField& psi,
                        const RegularizationPolicy& policy,
                        std::optional<double> phase_anchor = std::nullopt);

/// Parameters of g2 after g1: (gamma2 + lambda2 gamma1, lambda2 lambda1,
/// lambda2 theta1 + theta2).
GaugeTransform compose(const GaugeTransform& g2, const GaugeTransform& g1);

/// (-gamma/lambda, 1/lambda, -theta/lambda).
GaugeTransform invert(const GaugeTransform& g);

/// Largest parameter difference between two transforms.
double parameter_distance(const GaugeTransform& a, const GaugeTransform& b);

}  // namespace nlgauge
