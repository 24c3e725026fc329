#include "nlgauge/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <numbers>
#include <string>
#include <utility>

namespace nlgauge {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (dimension, n, direction) and kept for
// the lifetime of the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dimension, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dimension, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = dimension == 1 ? n : static_cast<std::size_t>(n) * n;
    std::vector<Complex> in(total), out(total);
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dimension == 1 ? fftw_plan_dft_1d(n, pin, pout, sign, flags)
                                    : fftw_plan_dft_2d(n, n, pin, pout, sign, flags);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void transform(const Grid& grid, const Complex* in, Complex* out, int sign) {
  fftw_plan plan = PlanCache::instance().get(grid.dimension(), grid.points_per_axis(), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

// Multiplier for one FFT bin along one axis.
Complex derivative_factor(const Grid& grid, int bin, int order) {
  const int n = grid.points_per_axis();
  const double k = grid.wavenumber(bin);
  if (order == 1) {
    if (bin == n / 2) return 0.0;
    return Complex(0.0, k);
  }
  return -k * k;
}

void check_axis_order(const Grid& grid, int axis, int order) {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("derivative order must be 1 or 2, got " + std::to_string(order));
  }
  if (axis < 0 || axis >= grid.dimension()) {
    throw std::invalid_argument("axis " + std::to_string(axis) + " out of range for " +
                                std::to_string(grid.dimension()) + "D grid");
  }
}

}  // namespace

Grid Grid::make(int dimension, int n, double length) {
  if (dimension != 1 && dimension != 2) {
    throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(dimension));
  }
  if (n < 8) throw std::invalid_argument("grid needs at least 8 points per axis");
  if (n % 2 != 0) throw std::invalid_argument("grid points per axis must be even");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("grid length must be positive and finite");
  }
  return Grid(dimension, n, length);
}

std::size_t Grid::size() const {
  return dimension_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
}

double Grid::cell_volume() const { return dimension_ == 1 ? spacing() : spacing() * spacing(); }

std::vector<double> Grid::coordinates() const {
  std::vector<double> x(n_);
  for (int i = 0; i < n_; ++i) x[i] = coordinate(i);
  return x;
}

double Grid::wavenumber(int i) const {
  const int m = i <= n_ / 2 ? i : i - n_;
  return 2.0 * std::numbers::pi / length_ * m;
}

bool all_finite(const RealField& f) {
  for (double v : f) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool all_finite(const ComplexField& f) {
  for (const Complex& v : f) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

void require_finite(const ComplexField& f, const char* what) {
  if (!all_finite(f)) throw std::invalid_argument(std::string(what) + " has non-finite entries");
}

RealField real_part(const ComplexField& f) {
  RealField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

Spectrum::Spectrum(const ComplexField& f) : grid_(f.grid()), coefficients_(f.size()) {
  transform(grid_, f.data().data(), coefficients_.data(), FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(f.size());
  for (auto& c : coefficients_) c *= scale;
}

ComplexField Spectrum::multiplied(std::span<const Complex> factor) const {
  std::vector<Complex> work(coefficients_.size());
  for (std::size_t i = 0; i < work.size(); ++i) work[i] = coefficients_[i] * factor[i];
  ComplexField out(grid_);
  transform(grid_, work.data(), out.data().data(), FFTW_BACKWARD);
  return out;
}

ComplexField Spectrum::derivative(int axis, int order) const {
  check_axis_order(grid_, axis, order);
  const int n = grid_.points_per_axis();
  std::vector<Complex> factor(coefficients_.size());
  if (grid_.dimension() == 1) {
    for (int i = 0; i < n; ++i) factor[i] = derivative_factor(grid_, i, order);
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        factor[static_cast<std::size_t>(i) * n + j] =
            derivative_factor(grid_, axis == 0 ? i : j, order);
      }
    }
  }
  return multiplied(factor);
}

ComplexField Spectrum::laplacian() const {
  const auto k2 = wavenumber_squared(grid_);
  std::vector<Complex> factor(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) factor[i] = -k2[i];
  return multiplied(factor);
}

std::vector<double> wavenumber_squared(const Grid& grid) {
  const int n = grid.points_per_axis();
  std::vector<double> k2(grid.size());
  if (grid.dimension() == 1) {
    for (int i = 0; i < n; ++i) k2[i] = grid.wavenumber(i) * grid.wavenumber(i);
  } else {
    for (int i = 0; i < n; ++i) {
      const double kx = grid.wavenumber(i);
      for (int j = 0; j < n; ++j) {
        const double ky = grid.wavenumber(j);
        k2[static_cast<std::size_t>(i) * n + j] = kx * kx + ky * ky;
      }
    }
  }
  return k2;
}

ComplexField differentiate(const ComplexField& f, int axis, int order) {
  check_axis_order(f.grid(), axis, order);
  require_finite(f, "differentiated field");
  return Spectrum(f).derivative(axis, order);
}

RealField differentiate(const RealField& f, int axis, int order) {
  return real_part(differentiate(to_complex(f), axis, order));
}

ComplexField laplacian(const ComplexField& f) { return Spectrum(f).laplacian(); }

RealField laplacian(const RealField& f) { return real_part(laplacian(to_complex(f))); }

double integrate(const RealField& f) {
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum * f.grid().cell_volume();
}

double l2_norm(const ComplexField& f) {
  double sum = 0.0;
  for (const Complex& v : f) sum += std::norm(v);
  return std::sqrt(sum * f.grid().cell_volume());
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("l2_distance: grid mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - b[i]);
  return std::sqrt(sum * a.grid().cell_volume());
}

double max_abs_difference(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("max_abs_difference: grid mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Complex inner_product(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("inner_product: grid mismatch");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum * a.grid().cell_volume();
}

}  // namespace nlgauge
