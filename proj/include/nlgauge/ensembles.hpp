#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "nlgauge/dynamics.hpp"
#include "nlgauge/grid.hpp"

namespace nlgauge {

struct MixtureComponent {
  double weight = 0.0;
  ComplexField state;
};

/// Weighted ensemble {(lambda_j, psi_j)} with positive weights summing to one
/// and normalized component states on a common grid.
class MixedState {
 public:
  /// Throws std::invalid_argument if the list is empty, a weight is not
  /// positive, the weights do not sum to 1 within 1e-12, a state is not
  /// normalized within 1e-10, or the grids differ.
  explicit MixedState(std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const { return components_; }
  const Grid& grid() const { return components_.front().state.grid(); }

 private:
  std::vector<MixtureComponent> components_;
};

/// Discretized kernel W(x_i, x_j) of a density operator on a 1D grid. The
/// operator acting on grid functions is W * dx.
class DensityMatrix {
 public:
  DensityMatrix(const Grid& grid, Eigen::MatrixXcd kernel);

  const Grid& grid() const { return grid_; }
  const Eigen::MatrixXcd& kernel() const { return kernel_; }

  /// sum_i W(x_i, x_i) dx
  double trace() const;
  /// max |W - W^H|
  double hermiticity_error() const;
  /// Eigenvalues of the operator W dx, ascending.
  Eigen::VectorXd eigenvalues() const;
  double min_eigenvalue() const;

  /// max |W_ij - other_ij|
  double max_difference(const DensityMatrix& other) const;
  /// dx-weighted Frobenius norm of the kernel difference,
  /// sqrt(sum |dW|^2 dx^2). Equals the Hilbert-Schmidt norm of the operator
  /// difference.
  double frobenius_distance(const DensityMatrix& other) const;
  /// Trace norm of the operator difference: sum of |eigenvalues| of dW dx.
  double trace_distance(const DensityMatrix& other) const;

 private:
  Grid grid_;
  Eigen::MatrixXcd kernel_;
};

/// W(x, y) = sum_j lambda_j psi_j(x) conj(psi_j(y)). 1D grids only.
DensityMatrix density_matrix(const MixedState& m);

/// Two equal-weight decompositions of the same density matrix:
///   A = {(1/2, a), (1/2, b)}
///   B = {(1/2, cos t a + sin t b), (1/2, -sin t a + cos t b)}.
/// Throws std::invalid_argument unless a and b are orthonormal within 1e-10,
/// and InvariantError if the two density matrices differ by more than 1e-12.
std::pair<MixedState, MixedState> equivalent_decompositions(const ComplexField& a,
                                                            const ComplexField& b, double angle);

/// Standard orthonormal pair: Gaussians of width `width` centered at
/// L/2 -/+ separation/2, normalized, with the second Gram-Schmidt
/// orthogonalized against the first. The canonical choice is
/// separation = L/4, width = L/32.
std::pair<ComplexField, ComplexField> two_gaussian_pair(const Grid& grid, double separation,
                                                        double width);
std::pair<ComplexField, ComplexField> canonical_pair(const Grid& grid);

/// D(t) = frobenius_distance(W_A(t), W_B(t)) with every component evolved
/// independently under `c`. Throws InvariantError if the initial density
/// matrices differ by more than 1e-10.
std::vector<SeriesPoint> mixed_divergence(const NLSECoefficients& c, const Potential& v,
                                          const MixedState& a, const MixedState& b,
                                          const SimulationConfig& config);

/// Psi(x, y) = psi1(x) psi2(y) on the 2D version of the common grid.
ComplexField tensor_product(const ComplexField& psi1, const ComplexField& psi2);

/// integral |Psi(x, y)|^2 dy as a 1D field of x.
RealField marginal_density(const ComplexField& psi2d);

/// V(x, y) = v1(x) + v2(y).
Potential additive_potential(const Potential& v1, const Potential& v2);

struct SeparabilityReport {
  /// L2 distance between the 2D evolution and the product of 1D evolutions.
  std::vector<SeriesPoint> residual;
  /// sup over frames of max |marginal_x(Psi_t) - |psi1_t|^2|.
  double marginal_density_sup = 0.0;

  double residual_sup() const;
};

/// Evolves psi1 (x) psi2 under the 2D equation with V = v1 + v2 and compares
/// with the product of the separately evolved factors.
SeparabilityReport separability_residual(const NLSECoefficients& c, const Potential& v1,
                                         const Potential& v2, const ComplexField& psi1,
                                         const ComplexField& psi2,
                                         const SimulationConfig& config);

}  // namespace nlgauge
