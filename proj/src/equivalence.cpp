#include "nlgauge/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace nlgauge {

namespace {

void require_constant_zero_theta(const GaugeTransform& g) {
  if (!g.theta().is_zero()) {
    throw std::invalid_argument("coefficient push-forward requires theta = 0");
  }
}

// Residuals below this are indistinguishable from accumulated rounding.
constexpr double kRoundingFloor = 1e-13;

}  // namespace

NLSECoefficients push_forward_linear(double gamma, double lambda, double nu1, double mu0) {
  return push_forward_family(GaugeTransform(gamma, lambda), NLSECoefficients::linear(nu1, mu0));
}

NLSECoefficients push_forward_family(const GaugeTransform& g, const NLSECoefficients& c) {
  require_constant_zero_theta(g);
  c.validate();
  const double gm = g.gamma();
  const double l = g.lambda();
  const double kinetic_shift = c.nu1 * (l + (gm * gm - 1.0) / l);

  NLSECoefficients out;
  out.nu1 = c.nu1 / l;
  out.nu2 = c.nu2 - gm * c.nu1 / (2.0 * l);
  out.mu0 = l * c.mu0;
  out.mu1 = l * c.mu1 + gm / 2.0;
  out.mu2 = l * c.mu2 - gm * c.nu2 + gm * c.nu1 * c.mu1 + kinetic_shift / 2.0;
  out.mu3 = l * c.mu3;
  out.mu4 = l * c.mu4 - gm / 2.0 + 2.0 * gm * c.nu1 * c.mu3;
  out.mu5 = l * c.mu5 + gm * c.nu1 * c.mu4 + gm * gm * c.nu1 * c.nu1 * c.mu3 / l -
            kinetic_shift / 4.0;
  out.alpha1 = l * c.alpha1 - gm * c.alpha2 / 2.0;
  out.alpha2 = c.alpha2;
  return out;
}

bool in_linearizable_family(const NLSECoefficients& c, double tol) {
  if (c.nu1 == 0.0) return false;
  const auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  if (!near(c.mu3, 0.0) || !near(c.alpha1, 0.0) || !near(c.alpha2, 0.0)) return false;
  if (!near(c.mu4, -c.mu1) || !near(c.mu2, -2.0 * c.mu5)) return false;
  if (!near(c.nu2, -c.nu1 * c.mu1)) return false;
  const double lambda_sq = 2.0 * c.mu2 / c.nu1 + 1.0 - 4.0 * c.mu1 * c.mu1;
  return lambda_sq > 0.0;
}

CommutingRun commuting_run(const GaugeTransform& g, const NLSECoefficients& c,
                           const NLSECoefficients& pushed, const ComplexField& psi0,
                           const Potential& v, const SimulationConfig& config) {
  const GaugedField start = apply_gauge(g, psi0, config.policy);

  auto path_a = std::async(std::launch::async, [&] { return evolve(c, v, psi0, config); });
  Trajectory path_b = evolve(pushed, v, start.field, config, start.phase_anchor);
  Trajectory plain_a = path_a.get();

  CommutingRun run;
  run.max_regularized_fraction =
      std::max(plain_a.max_regularized_fraction(), path_b.max_regularized_fraction());
  for (std::size_t n = 0; n < plain_a.frames.size(); ++n) {
    const Frame& fa = plain_a.frames[n];
    const Frame& fb = path_b.frames[n];
    const GaugedField gauged = apply_gauge(g, fa.psi, config.policy, fa.phase_anchor);
    run.residual.push_back({fa.t, l2_distance(gauged.field, fb.psi)});
    for (std::size_t i = 0; i < fb.psi.size(); ++i) {
      run.density_sup =
          std::max(run.density_sup, std::abs(std::norm(gauged.field[i]) - std::norm(fb.psi[i])));
    }
  }
  return run;
}

EquivalenceReport commuting_residual_with(const GaugeTransform& g, const NLSECoefficients& c,
                                          const NLSECoefficients& pushed,
                                          const ComplexField& psi0, const Potential& v,
                                          const SimulationConfig& config) {
  const auto sup = [](const std::vector<SeriesPoint>& s) {
    double m = 0.0;
    for (const auto& p : s) m = std::max(m, p.value);
    return m;
  };

  const CommutingRun base = commuting_run(g, c, pushed, psi0, v, config);
  SimulationConfig fine = config;
  fine.dt = config.dt / 2.0;
  fine.output_every = config.output_every * 2;
  const CommutingRun refined = commuting_run(g, c, pushed, psi0, v, fine);

  EquivalenceReport report;
  report.residual_series = base.residual;
  report.residual_sup = sup(base.residual);
  report.refined_residual_sup = sup(refined.residual);
  report.density_sup = std::max(base.density_sup, refined.density_sup);
  report.max_regularized_fraction =
      std::max(base.max_regularized_fraction, refined.max_regularized_fraction);
  if (report.residual_sup < kRoundingFloor && report.refined_residual_sup < kRoundingFloor) {
    report.refinement_order = std::numeric_limits<double>::quiet_NaN();
  } else {
    report.refinement_order = std::log2(report.residual_sup / report.refined_residual_sup);
  }
  return report;
}

EquivalenceReport commuting_residual(const GaugeTransform& g, const NLSECoefficients& c,
                                     const ComplexField& psi0, const Potential& v,
                                     const SimulationConfig& config) {
  return commuting_residual_with(g, c, push_forward_family(g, c), psi0, v, config);
}

}  // namespace nlgauge
