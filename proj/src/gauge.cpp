#include "nlgauge/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlgauge {

PositionPhase::PositionPhase(double constant) : value_(constant) {
  if (!std::isfinite(constant)) throw std::invalid_argument("theta must be finite");
}

PositionPhase::PositionPhase(RealField field) : value_(std::move(field)) {
  if (!all_finite(std::get<RealField>(value_))) {
    throw std::invalid_argument("theta field has non-finite entries");
  }
}

bool PositionPhase::is_zero() const {
  if (is_constant()) return std::get<double>(value_) == 0.0;
  const auto& f = std::get<RealField>(value_);
  return std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; });
}

double PositionPhase::at(std::size_t i) const {
  if (is_constant()) return std::get<double>(value_);
  return std::get<RealField>(value_)[i];
}

PositionPhase PositionPhase::scaled(double factor) const {
  if (is_constant()) return factor * std::get<double>(value_);
  RealField f = std::get<RealField>(value_);
  for (double& v : f) v *= factor;
  return PositionPhase(std::move(f));
}

PositionPhase PositionPhase::plus(const PositionPhase& other) const {
  if (is_constant() && other.is_constant()) {
    return std::get<double>(value_) + std::get<double>(other.value_);
  }
  const RealField& ref =
      is_constant() ? std::get<RealField>(other.value_) : std::get<RealField>(value_);
  if (!is_constant() && !other.is_constant() &&
      !(std::get<RealField>(value_).grid() == std::get<RealField>(other.value_).grid())) {
    throw std::invalid_argument("theta fields live on different grids");
  }
  RealField sum(ref.grid());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = at(i) + other.at(i);
  return PositionPhase(std::move(sum));
}

double PositionPhase::max_difference(const PositionPhase& other) const {
  if (is_constant() && other.is_constant()) {
    return std::abs(std::get<double>(value_) - std::get<double>(other.value_));
  }
  const RealField& ref =
      is_constant() ? std::get<RealField>(other.value_) : std::get<RealField>(value_);
  double m = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) m = std::max(m, std::abs(at(i) - other.at(i)));
  return m;
}

GaugeTransform::GaugeTransform(double gamma, double lambda, PositionPhase theta)
    : gamma_(gamma), lambda_(lambda), theta_(std::move(theta)) {
  if (!std::isfinite(gamma_) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("gauge parameters must be finite");
  }
  if (lambda_ == 0.0) throw std::invalid_argument("gauge lambda must be non-zero");
}

GaugedField apply_gauge(const GaugeTransform& g, const ComplexField& psi,
                        const RegularizationPolicy& policy, std::optional<double> phase_anchor) {
  require_finite(psi, "gauge input");
  const PhasePair rs = modulus_phase(psi, policy, phase_anchor);
  const double eps = policy.floor_for(density(psi));
  const double r_floor = std::sqrt(eps);

  GaugedField out{ComplexField(psi.grid()), 0.0, rs.regularized_points};
  auto new_phase = [&](std::size_t i) {
    return g.gamma() * std::log(std::max(rs.modulus[i], r_floor)) + g.lambda() * rs.phase[i] +
           g.theta().at(i);
  };
  for (std::size_t i = 0; i < psi.size(); ++i) {
    out.field[i] = std::polar(rs.modulus[i], new_phase(i));
  }
  out.phase_anchor = new_phase(0);
  return out;
}

GaugeTransform compose(const GaugeTransform& g2, const GaugeTransform& g1) {
  return {g2.gamma() + g2.lambda() * g1.gamma(), g2.lambda() * g1.lambda(),
          g1.theta().scaled(g2.lambda()).plus(g2.theta())};
}

GaugeTransform invert(const GaugeTransform& g) {
  return {-g.gamma() / g.lambda(), 1.0 / g.lambda(), g.theta().scaled(-1.0 / g.lambda())};
}

double parameter_distance(const GaugeTransform& a, const GaugeTransform& b) {
  return std::max({std::abs(a.gamma() - b.gamma()), std::abs(a.lambda() - b.lambda()),
                   a.theta().max_difference(b.theta())});
}

}  // namespace nlgauge
