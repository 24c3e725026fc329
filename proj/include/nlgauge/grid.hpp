#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace nlgauge {

using Complex = std::complex<double>;

/// Uniform periodic grid in one or two dimensions.
///
/// Coordinates along each axis are x_i = i * dx for i = 0..N-1, with x_N
/// identified with x_0. Two-dimensional fields are stored row-major: the flat
/// index of point (i, j) is i * N + j, where i runs along axis 0 and j along
/// axis 1.
class Grid {
 public:
  /// Throws std::invalid_argument unless dimension is 1 or 2, n is even and
  /// at least 8, and length is positive and finite.
  static Grid make(int dimension, int n, double length);

  int dimension() const { return dimension_; }
  int points_per_axis() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  std::size_t size() const;
  /// dx^dimension, the quadrature weight of one grid point.
  double cell_volume() const;

  double coordinate(int i) const { return i * spacing(); }
  std::vector<double> coordinates() const;

  /// Symmetric wavenumber for FFT bin i: bins 0..N/2 map to 0..N/2, the rest
  /// to negative values, all scaled by 2*pi/L. The Nyquist bin is +N/2.
  double wavenumber(int i) const;

  /// Same grid parameters with the given dimension.
  Grid with_dimension(int dimension) const { return make(dimension, n_, length_); }

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dimension, int n, double length) : dimension_(dimension), n_(n), length_(length) {}

  int dimension_;
  int n_;
  double length_;
};

/// Values sampled on a Grid.
template <class T>
class Field {
 public:
  explicit Field(const Grid& grid) : grid_(grid), values_(grid.size(), T{}) {}
  Field(const Grid& grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("field size does not match grid");
    }
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& at(int i, int j) { return values_[static_cast<std::size_t>(i) * grid_.points_per_axis() + j]; }
  const T& at(int i, int j) const {
    return values_[static_cast<std::size_t>(i) * grid_.points_per_axis() + j];
  }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::vector<T>& data() { return values_; }
  const std::vector<T>& data() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  Grid grid_;
  std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;

/// Builds a field from f(x) on a 1D grid or f(x, y) on a 2D grid.
template <class T, class F>
Field<T> sample(const Grid& grid, F&& f) {
  Field<T> out(grid);
  const int n = grid.points_per_axis();
  if constexpr (std::is_invocable_v<F, double>) {
    if (grid.dimension() != 1) throw std::invalid_argument("sample: f(x) needs a 1D grid");
    for (int i = 0; i < n; ++i) out[i] = f(grid.coordinate(i));
  } else {
    if (grid.dimension() != 2) throw std::invalid_argument("sample: f(x, y) needs a 2D grid");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.at(i, j) = f(grid.coordinate(i), grid.coordinate(j));
  }
  return out;
}

bool all_finite(const RealField& f);
bool all_finite(const ComplexField& f);

/// Throws std::invalid_argument naming `what` if the field has NaN/Inf entries.
void require_finite(const ComplexField& f, const char* what);

RealField real_part(const ComplexField& f);
ComplexField to_complex(const RealField& f);

/// Spectral derivative of the given order (1 or 2) along `axis`.
///
/// Multiplies each Fourier mode by (ik)^order. For odd order the Nyquist mode
/// is zeroed; for order 2 it is kept and multiplied by -k_nyq^2. Applying the
/// first derivative twice therefore differs from the second derivative only
/// in the Nyquist component.
ComplexField differentiate(const ComplexField& f, int axis, int order);
RealField differentiate(const RealField& f, int axis, int order);

/// Sum over all axes of the second derivative.
ComplexField laplacian(const ComplexField& f);
RealField laplacian(const RealField& f);

/// Rectangle rule: sum of f times dx^dimension (spectrally accurate for
/// smooth periodic integrands).
double integrate(const RealField& f);

/// sqrt(integral |f|^2).
double l2_norm(const ComplexField& f);
/// sqrt(integral |a - b|^2).
double l2_distance(const ComplexField& a, const ComplexField& b);
/// max |a - b| over grid points.
double max_abs_difference(const ComplexField& a, const ComplexField& b);
/// <a, b> = integral conj(a) b.
Complex inner_product(const ComplexField& a, const ComplexField& b);

/// Fourier-space representation of a field. Forward-transforms once so
/// several derivatives can be taken from the same spectrum.
class Spectrum {
 public:
  explicit Spectrum(const ComplexField& f);

  ComplexField derivative(int axis, int order) const;
  ComplexField laplacian() const;
  /// Inverse transform of the spectrum multiplied pointwise by `factor`,
  /// which is indexed like the field.
  ComplexField multiplied(std::span<const Complex> factor) const;

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  std::vector<Complex> coefficients_;
};

/// |k|^2 for each FFT bin, laid out like the field.
std::vector<double> wavenumber_squared(const Grid& grid);

}  // namespace nlgauge
