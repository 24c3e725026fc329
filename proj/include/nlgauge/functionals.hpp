#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "nlgauge/grid.hpp"

namespace nlgauge {

/// Floor applied wherever the density appears in a denominator or a logarithm.
/// The absolute floor is eps = rho_floor_rel * max(rho).
struct RegularizationPolicy {
  double rho_floor_rel = 1e-12;

  void validate() const;
  double floor_for(const RealField& rho) const;
};

/// rho = |psi|^2.
RealField density(const ComplexField& psi);

/// Probability current J = -2 nu1 Im(conj(psi) grad psi), one field per axis.
///
/// With this sign the linear equation i d_t psi = nu1 Laplacian psi satisfies
/// d_t rho + div J = 0.
std::vector<RealField> current(const ComplexField& psi, double nu1);

/// Modulus R = |psi| and unwrapped phase S.
struct PhasePair {
  RealField modulus;
  RealField phase;
  /// Points with rho <= eps; their phase is carried over from the previous
  /// point along the scan and has no physical meaning.
  std::size_t regularized_points = 0;

  bool warning() const { return regularized_points > 0; }
};

/// Splits psi into modulus and unwrapped phase.
///
/// The phase at index 0 is the principal value of arg psi, or, when `anchor`
/// is given, the branch of it closest to the anchor. In 1D the scan runs along
/// the grid; in 2D it runs down the first column (axis 0) and then along each
/// row (axis 1). Each step picks the branch closest to the previous value.
PhasePair modulus_phase(const ComplexField& psi, const RegularizationPolicy& policy,
                        std::optional<double> anchor = std::nullopt);

/// R exp(iS).
ComplexField reconstruct(const PhasePair& pair);

/// Branch of `principal` (mod 2 pi) closest to `reference`.
double nearest_branch(double principal, double reference);

/// Result of one Rj evaluation.
struct FunctionalField {
  RealField values;
  double regularized_fraction = 0.0;
};

/// The density/current quotients
///   R1 = div J / rho,      R2 = Laplacian rho / rho,   R3 = J^2 / rho^2,
///   R4 = J.grad rho / rho^2,   R5 = (grad rho)^2 / rho^2,
/// with denominators replaced by max(rho, eps) and max(rho^2, eps^2).
/// Throws std::invalid_argument for index outside 1..5.
FunctionalField functional_R(int index, const ComplexField& psi, double nu1,
                             const RegularizationPolicy& policy);

/// Several quotients sharing one set of derivatives. Entries of `values` that
/// were not requested are empty.
struct FunctionalSet {
  RealField rho;
  double floor = 0.0;
  std::array<std::optional<RealField>, 5> values;
  double regularized_fraction = 0.0;
};

/// Computes the requested quotients. When `laplacian_psi` is supplied it is
/// used instead of recomputing the Laplacian of psi.
FunctionalSet compute_functionals(const ComplexField& psi, double nu1,
                                  const RegularizationPolicy& policy,
                                  const std::array<bool, 5>& wanted,
                                  const ComplexField* laplacian_psi = nullptr);

}  // namespace nlgauge
