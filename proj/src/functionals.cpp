#include "nlgauge/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlgauge {

void RegularizationPolicy::validate() const {
  if (!(rho_floor_rel > 0.0) || !std::isfinite(rho_floor_rel)) {
    throw std::invalid_argument("rho_floor_rel must be positive and finite");
  }
}

double RegularizationPolicy::floor_for(const RealField& rho) const {
  const double max_rho = rho.size() == 0 ? 0.0 : *std::max_element(rho.begin(), rho.end());
  return std::max(rho_floor_rel * max_rho, std::numeric_limits<double>::min());
}

RealField density(const ComplexField& psi) {
  RealField rho(psi.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
  return rho;
}

std::vector<RealField> current(const ComplexField& psi, double nu1) {
  const Spectrum spectrum(psi);
  std::vector<RealField> j;
  for (int axis = 0; axis < psi.grid().dimension(); ++axis) {
    const ComplexField d = spectrum.derivative(axis, 1);
    RealField component(psi.grid());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      component[i] = -2.0 * nu1 * (std::conj(psi[i]) * d[i]).imag();
    }
    j.push_back(std::move(component));
  }
  return j;
}

double nearest_branch(double principal, double reference) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return principal + two_pi * std::round((reference - principal) / two_pi);
}

PhasePair modulus_phase(const ComplexField& psi, const RegularizationPolicy& policy,
                        std::optional<double> anchor) {
  policy.validate();
  const Grid& grid = psi.grid();
  PhasePair out{RealField(grid), RealField(grid), 0};
  const RealField rho = density(psi);
  const double eps = policy.floor_for(rho);
  for (std::size_t i = 0; i < psi.size(); ++i) out.modulus[i] = std::abs(psi[i]);

  auto& s = out.phase;
  auto visit = [&](std::size_t idx, std::size_t prev) {
    if (rho[idx] <= eps) {
      s[idx] = s[prev];
      ++out.regularized_points;
    } else {
      s[idx] = nearest_branch(std::arg(psi[idx]), s[prev]);
    }
  };

  const double start = std::arg(psi[0]);
  s[0] = anchor ? nearest_branch(start, *anchor) : start;
  if (rho[0] <= eps) ++out.regularized_points;

  const int n = grid.points_per_axis();
  if (grid.dimension() == 1) {
    for (int i = 1; i < n; ++i) visit(i, i - 1);
  } else {
    const auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
    for (int i = 1; i < n; ++i) visit(idx(i, 0), idx(i - 1, 0));
    for (int i = 0; i < n; ++i) {
      for (int j = 1; j < n; ++j) visit(idx(i, j), idx(i, j - 1));
    }
  }
  return out;
}

ComplexField reconstruct(const PhasePair& pair) {
  ComplexField out(pair.modulus.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::polar(pair.modulus[i], pair.phase[i]);
  return out;
}

FunctionalSet compute_functionals(const ComplexField& psi, double nu1,
                                  const RegularizationPolicy& policy,
                                  const std::array<bool, 5>& wanted,
                                  const ComplexField* laplacian_psi) {
  policy.validate();
  const Grid& grid = psi.grid();
  const std::size_t size = psi.size();
  const int dim = grid.dimension();

  FunctionalSet out{density(psi), 0.0, {}, 0.0};
  const RealField& rho = out.rho;
  out.floor = policy.floor_for(rho);
  const double eps = out.floor;

  std::size_t regularized = 0;
  for (double r : rho) regularized += r < eps ? 1 : 0;
  out.regularized_fraction = static_cast<double>(regularized) / static_cast<double>(size);

  if (std::none_of(wanted.begin(), wanted.end(), [](bool w) { return w; })) return out;

  // Derivatives of rho and J are assembled from derivatives of psi by the
  // product rule, so no field of doubled bandwidth is ever re-transformed.
  const Spectrum spectrum(psi);
  const bool need_lap = wanted[0] || wanted[1];
  const bool need_grad = wanted[1] || wanted[2] || wanted[3] || wanted[4];

  ComplexField lap(grid);
  if (need_lap) lap = laplacian_psi != nullptr ? *laplacian_psi : spectrum.laplacian();

  std::vector<ComplexField> grad;
  if (need_grad) {
    for (int axis = 0; axis < dim; ++axis) grad.push_back(spectrum.derivative(axis, 1));
  }

  auto quotient1 = [&](double num, std::size_t i) { return num / std::max(rho[i], eps); };
  auto quotient2 = [&](double num, std::size_t i) {
    return num / std::max(rho[i] * rho[i], eps * eps);
  };

  for (int index = 1; index <= 5; ++index) {
    if (!wanted[index - 1]) continue;
    RealField values(grid);
    for (std::size_t i = 0; i < size; ++i) {
      const Complex conj_psi = std::conj(psi[i]);
      double jj = 0.0, jg = 0.0, gg = 0.0, grad_sq = 0.0;
      if (need_grad) {
        for (int axis = 0; axis < dim; ++axis) {
          const Complex p = conj_psi * grad[axis][i];
          const double j_axis = -2.0 * nu1 * p.imag();
          const double g_axis = 2.0 * p.real();
          jj += j_axis * j_axis;
          jg += j_axis * g_axis;
          gg += g_axis * g_axis;
          grad_sq += std::norm(grad[axis][i]);
        }
      }
      switch (index) {
        case 1:
          values[i] = quotient1(-2.0 * nu1 * (conj_psi * lap[i]).imag(), i);
          break;
        case 2:
          values[i] = quotient1(2.0 * (conj_psi * lap[i]).real() + 2.0 * grad_sq, i);
          break;
        case 3:
          values[i] = quotient2(jj, i);
          break;
        case 4:
          values[i] = quotient2(jg, i);
          break;
        default:
          values[i] = quotient2(gg, i);
          break;
      }
    }
    out.values[index - 1] = std::move(values);
  }
  return out;
}

FunctionalField functional_R(int index, const ComplexField& psi, double nu1,
                             const RegularizationPolicy& policy) {
  if (index < 1 || index > 5) {
    throw std::invalid_argument("functional index must be in 1..5, got " + std::to_string(index));
  }
  require_finite(psi, "functional input");
  std::array<bool, 5> wanted{};
  wanted[index - 1] = true;
  FunctionalSet set = compute_functionals(psi, nu1, policy, wanted);
  return {std::move(*set.values[index - 1]), set.regularized_fraction};
}

}  // namespace nlgauge
