#include "nlgauge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlgauge/errors.hpp"

namespace nlgauge {

namespace {

constexpr double kNormTolerance = 1e-10;
constexpr double kNormAbort = 1e-3;

double regularized_fraction(const ComplexField& psi, const RegularizationPolicy& policy) {
  const RealField rho = density(psi);
  const double eps = policy.floor_for(rho);
  const auto count = std::count_if(rho.begin(), rho.end(), [eps](double r) { return r < eps; });
  return static_cast<double>(count) / static_cast<double>(rho.size());
}

Frame make_frame(double t, const ComplexField& psi, const RegularizationPolicy& policy,
                 double anchor) {
  const double norm = l2_norm(psi);
  return {t, psi, norm * norm, regularized_fraction(psi, policy), anchor};
}

void require_normalized(const ComplexField& psi0) {
  const double norm = l2_norm(psi0);
  if (std::abs(norm * norm - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "initial state must be normalized (|psi|^2 integrates to " << norm * norm << ")";
    throw std::invalid_argument(msg.str());
  }
}

void require_same_grid(const Potential& v, const ComplexField& psi) {
  if (!(v.values.grid() == psi.grid())) {
    throw std::invalid_argument("potential and state live on different grids");
  }
}

double advance_anchor(const ComplexField& psi, double anchor) {
  return nearest_branch(std::arg(psi[0]), anchor);
}

void check_step(const ComplexField& psi, double t, double initial_norm_sq) {
  if (!all_finite(psi)) {
    std::ostringstream msg;
    msg << "non-finite values at t=" << t << "; the run is unstable, reduce dt";
    throw NumericalError(msg.str());
  }
  const double norm = l2_norm(psi);
  if (std::abs(norm * norm - initial_norm_sq) > kNormAbort) {
    std::ostringstream msg;
    msg << "norm drifted to " << norm * norm << " at t=" << t << "; the run is unresolved";
    throw NumericalError(msg.str());
  }
}

// Drives a one-step map over the frame schedule shared by both integrators.
template <class Step>
Trajectory drive(const ComplexField& psi0, const SimulationConfig& config,
                 std::optional<double> phase_anchor, Step&& step) {
  const int steps = config.step_count();
  const double norm0 = std::pow(l2_norm(psi0), 2);
  double anchor = phase_anchor ? nearest_branch(std::arg(psi0[0]), *phase_anchor)
                               : std::arg(psi0[0]);
  Trajectory traj;
  traj.frames.push_back(make_frame(0.0, psi0, config.policy, anchor));
  ComplexField psi = psi0;
  for (int n = 1; n <= steps; ++n) {
    const double t_prev = (n - 1) * config.dt;
    const double h = n == steps ? config.t_final - t_prev : config.dt;
    psi = step(psi, h, anchor);
    const double t = n == steps ? config.t_final : n * config.dt;
    check_step(psi, t, norm0);
    anchor = advance_anchor(psi, anchor);
    if (n % config.output_every == 0 || n == steps) {
      traj.frames.push_back(make_frame(t, psi, config.policy, anchor));
    }
  }
  return traj;
}

}  // namespace

NLSECoefficients NLSECoefficients::linear(double nu1, double mu0) {
  NLSECoefficients c;
  c.nu1 = nu1;
  c.mu0 = mu0;
  return c;
}

std::array<double, 10> NLSECoefficients::as_array() const {
  return {nu1, nu2, mu0, mu1, mu2, mu3, mu4, mu5, alpha1, alpha2};
}

NLSECoefficients NLSECoefficients::from_array(const std::array<double, 10>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
}

bool NLSECoefficients::linear_case() const {
  return nu2 == 0.0 && mu1 == 0.0 && mu2 == 0.0 && mu3 == 0.0 && mu4 == 0.0 && mu5 == 0.0 &&
         alpha1 == 0.0 && alpha2 == 0.0;
}

void NLSECoefficients::validate() const {
  for (double v : as_array()) {
    if (!std::isfinite(v)) throw std::invalid_argument("coefficients must be finite");
  }
}

double max_difference(const NLSECoefficients& a, const NLSECoefficients& b) {
  const auto x = a.as_array();
  const auto y = b.as_array();
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

bool Potential::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

double effective_diffusivity(const NLSECoefficients& c) {
  // Linearizing about a uniform state at rest, a mode exp(ikx) of
  // (delta rho, delta S) evolves with the matrix
  //   k^2 [[-2 nu2, -2 nu1 rho], [(nu1 / 2 + mu2) / rho, -2 nu1 mu1]],
  // whose eigenvalues are k^2 times the roots of r^2 - tr r + det.
  const double tr = -2.0 * (c.nu2 + c.nu1 * c.mu1);
  const double det = c.nu1 * c.nu1 + 2.0 * c.nu1 * c.mu2 + 4.0 * c.nu1 * c.nu2 * c.mu1;
  const double disc = tr * tr - 4.0 * det;
  const double radius = disc >= 0.0 ? 0.5 * (std::abs(tr) + std::sqrt(disc))
                                    : std::sqrt(std::abs(det));
  return std::max({std::abs(c.nu1), std::abs(c.nu2), radius});
}

double SimulationConfig::stability_bound(const Grid& grid, const NLSECoefficients& c) {
  const double dx2 = grid.spacing() * grid.spacing();
  return 0.2 * dx2 / std::max(effective_diffusivity(c), dx2);
}

void SimulationConfig::validate(const Grid& grid, const NLSECoefficients& c) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive");
  if (output_every < 1) throw ConfigError("output_every must be at least 1");
  try {
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double bound = stability_bound(grid, c);
  if (!force_dt && dt > bound) {
    std::ostringstream msg;
    msg << "dt=" << dt << " exceeds the stability bound " << bound
        << " (pass --force-dt to override)";
    throw ConfigError(msg.str());
  }
}

int SimulationConfig::step_count() const {
  return std::max(1, static_cast<int>(std::ceil(t_final / dt - 1e-9)));
}

double Trajectory::max_norm_drift() const {
  double m = 0.0;
  for (const auto& f : frames) m = std::max(m, std::abs(f.norm - frames.front().norm));
  return m;
}

double Trajectory::max_regularized_fraction() const {
  double m = 0.0;
  for (const auto& f : frames) m = std::max(m, f.regularized_fraction);
  return m;
}

ComplexField rhs(const NLSECoefficients& c, const Potential& v, const ComplexField& psi,
                 const RegularizationPolicy& policy, std::optional<double> phase_anchor,
                 RhsDiagnostics* diagnostics) {
  require_same_grid(v, psi);
  const std::size_t size = psi.size();

  const std::array<bool, 5> wanted{c.mu1 != 0.0, c.mu2 != 0.0 || c.nu2 != 0.0, c.mu3 != 0.0,
                                   c.mu4 != 0.0, c.mu5 != 0.0};
  const bool need_lap = c.nu1 != 0.0 || wanted[0] || wanted[1];
  ComplexField lap(psi.grid());
  if (need_lap) lap = laplacian(psi);

  const FunctionalSet r = compute_functionals(psi, c.nu1, policy, wanted, &lap);
  if (diagnostics != nullptr) diagnostics->regularized_fraction = r.regularized_fraction;

  // Real part of the multiplier collects every term that acts as a real
  // potential; the imaginary part carries nu2 R2.
  std::vector<Complex> multiplier(size, 0.0);
  if (c.mu0 != 0.0) {
    for (std::size_t i = 0; i < size; ++i) multiplier[i] += c.mu0 * v.values[i];
  }
  const std::array<double, 5> mu{c.mu1, c.mu2, c.mu3, c.mu4, c.mu5};
  for (int j = 0; j < 5; ++j) {
    if (mu[j] == 0.0) continue;
    const RealField& rj = *r.values[j];
    for (std::size_t i = 0; i < size; ++i) multiplier[i] += mu[j] * rj[i];
  }
  if (c.nu2 != 0.0) {
    const RealField& r2 = *r.values[1];
    for (std::size_t i = 0; i < size; ++i) multiplier[i] += Complex(0.0, c.nu2 * r2[i]);
  }
  if (c.alpha1 != 0.0) {
    for (std::size_t i = 0; i < size; ++i) {
      multiplier[i] += c.alpha1 * std::log(std::max(r.rho[i], r.floor));
    }
  }
  if (c.alpha2 != 0.0) {
    const PhasePair rs = modulus_phase(psi, policy, phase_anchor);
    for (std::size_t i = 0; i < size; ++i) multiplier[i] += c.alpha2 * rs.phase[i];
  }

  ComplexField out(psi.grid());
  const Complex minus_i(0.0, -1.0);
  for (std::size_t i = 0; i < size; ++i) {
    Complex h = multiplier[i] * psi[i];
    if (need_lap) h += c.nu1 * lap[i];
    out[i] = minus_i * h;
  }
  return out;
}

ComplexField step_rk4(const NLSECoefficients& c, const Potential& v, const ComplexField& psi,
                      double dt, const RegularizationPolicy& policy,
                      std::optional<double> phase_anchor) {
  if (dt == 0.0) return psi;
  const std::size_t size = psi.size();
  auto axpy = [&](const ComplexField& k, double a) {
    ComplexField out(psi.grid());
    for (std::size_t i = 0; i < size; ++i) out[i] = psi[i] + a * k[i];
    return out;
  };
  const ComplexField k1 = rhs(c, v, psi, policy, phase_anchor);
  const ComplexField k2 = rhs(c, v, axpy(k1, 0.5 * dt), policy, phase_anchor);
  const ComplexField k3 = rhs(c, v, axpy(k2, 0.5 * dt), policy, phase_anchor);
  const ComplexField k4 = rhs(c, v, axpy(k3, dt), policy, phase_anchor);
  ComplexField out(psi.grid());
  for (std::size_t i = 0; i < size; ++i) {
    out[i] = psi[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  if (!all_finite(out)) {
    throw NumericalError("RK4 step produced non-finite values; reduce dt");
  }
  return out;
}

Trajectory evolve(const NLSECoefficients& c, const Potential& v, const ComplexField& psi0,
                  const SimulationConfig& config, std::optional<double> phase_anchor) {
  c.validate();
  require_finite(psi0, "initial state");
  require_same_grid(v, psi0);
  require_normalized(psi0);
  config.validate(psi0.grid(), c);
  return drive(psi0, config, phase_anchor,
               [&](const ComplexField& psi, double h, double anchor) {
                 return step_rk4(c, v, psi, h, config.policy, anchor);
               });
}

Trajectory evolve_linear_exact(double nu1, double mu0, const Potential& v,
                               const ComplexField& psi0, const SimulationConfig& config,
                               std::optional<double> phase_anchor) {
  require_finite(psi0, "initial state");
  require_same_grid(v, psi0);
  require_normalized(psi0);
  // The exact propagator has no step-size limit.
  SimulationConfig unbounded = config;
  unbounded.force_dt = true;
  unbounded.validate(psi0.grid(), NLSECoefficients::linear(nu1, mu0));

  const Grid& grid = psi0.grid();
  const auto k2 = wavenumber_squared(grid);
  auto kinetic = [&](double h) {
    std::vector<Complex> factor(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) factor[i] = std::polar(1.0, nu1 * k2[i] * h);
    return factor;
  };

  if (mu0 == 0.0 || v.is_zero()) {
    const Spectrum initial(psi0);
    int n = 0;
    return drive(psi0, config, phase_anchor, [&](const ComplexField&, double, double) {
      ++n;
      const double t = n == config.step_count() ? config.t_final : n * config.dt;
      return initial.multiplied(kinetic(t));
    });
  }

  return drive(psi0, config, phase_anchor,
               [&](const ComplexField& psi, double h, double) {
                 ComplexField half(grid);
                 for (std::size_t i = 0; i < psi.size(); ++i) {
                   half[i] = std::polar(1.0, -0.5 * h * mu0 * v.values[i]) * psi[i];
                 }
                 ComplexField out = Spectrum(half).multiplied(kinetic(h));
                 for (std::size_t i = 0; i < out.size(); ++i) {
                   out[i] *= std::polar(1.0, -0.5 * h * mu0 * v.values[i]);
                 }
                 return out;
               });
}

double continuity_residual(const NLSECoefficients& c, const ComplexField& before,
                           const ComplexField& middle, const ComplexField& after, double h) {
  const Spectrum spectrum(middle);
  const ComplexField lap = spectrum.laplacian();
  std::vector<ComplexField> grad;
  for (int axis = 0; axis < middle.grid().dimension(); ++axis) {
    grad.push_back(spectrum.derivative(axis, 1));
  }
  RealField residual(middle.grid());
  for (std::size_t i = 0; i < middle.size(); ++i) {
    const Complex p = std::conj(middle[i]) * lap[i];
    const double div_j = -2.0 * c.nu1 * p.imag();
    double grad_sq = 0.0;
    for (const auto& g : grad) grad_sq += std::norm(g[i]);
    const double lap_rho = 2.0 * p.real() + 2.0 * grad_sq;
    const double drho_dt = (std::norm(after[i]) - std::norm(before[i])) / (2.0 * h);
    const double r = drho_dt - (-div_j + 2.0 * c.nu2 * lap_rho);
    residual[i] = r * r;
  }
  return std::sqrt(integrate(residual));
}

}  // namespace nlgauge
