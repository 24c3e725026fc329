#include "nlgauge/ensembles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <string>

#include "nlgauge/errors.hpp"

namespace nlgauge {

namespace {

void require_1d(const Grid& grid, const char* what) {
  if (grid.dimension() != 1) {
    throw std::invalid_argument(std::string(what) + " requires a 1D grid");
  }
}

std::vector<Trajectory> evolve_components(const NLSECoefficients& c, const Potential& v,
                                          const MixedState& m, const SimulationConfig& config) {
  std::vector<std::future<Trajectory>> jobs;
  for (const auto& comp : m.components()) {
    jobs.push_back(std::async(std::launch::async,
                              [&, psi = &comp.state] { return evolve(c, v, *psi, config); }));
  }
  std::vector<Trajectory> out;
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

DensityMatrix snapshot(const MixedState& m, const std::vector<Trajectory>& runs, std::size_t frame) {
  std::vector<MixtureComponent> comps;
  for (std::size_t j = 0; j < runs.size(); ++j) {
    comps.push_back({m.components()[j].weight, runs[j].frames[frame].psi});
  }
  const Grid& grid = m.grid();
  const int n = grid.points_per_axis();
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& comp : comps) {
    Eigen::Map<const Eigen::VectorXcd> psi(comp.state.data().data(), n);
    w.noalias() += comp.weight * psi * psi.adjoint();
  }
  return DensityMatrix(grid, std::move(w));
}

}  // namespace

MixedState::MixedState(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixed state needs at least one component");
  double total = 0.0;
  for (const auto& comp : components_) {
    if (!(comp.weight > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    if (!(comp.state.grid() == components_.front().state.grid())) {
      throw std::invalid_argument("mixture components live on different grids");
    }
    const double norm = l2_norm(comp.state);
    if (std::abs(norm * norm - 1.0) > 1e-10) {
      throw std::invalid_argument("mixture component is not normalized");
    }
    total += comp.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
}

DensityMatrix::DensityMatrix(const Grid& grid, Eigen::MatrixXcd kernel)
    : grid_(grid), kernel_(std::move(kernel)) {
  require_1d(grid_, "density matrix");
  if (kernel_.rows() != grid_.points_per_axis() || kernel_.cols() != grid_.points_per_axis()) {
    throw std::invalid_argument("density matrix shape does not match grid");
  }
}

double DensityMatrix::trace() const { return kernel_.trace().real() * grid_.spacing(); }

double DensityMatrix::hermiticity_error() const {
  return (kernel_ - kernel_.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  const Eigen::MatrixXcd op = 0.5 * (kernel_ + kernel_.adjoint()) * grid_.spacing();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double DensityMatrix::min_eigenvalue() const { return eigenvalues().minCoeff(); }

double DensityMatrix::max_difference(const DensityMatrix& other) const {
  return (kernel_ - other.kernel_).cwiseAbs().maxCoeff();
}

double DensityMatrix::frobenius_distance(const DensityMatrix& other) const {
  return (kernel_ - other.kernel_).norm() * grid_.spacing();
}

double DensityMatrix::trace_distance(const DensityMatrix& other) const {
  const DensityMatrix diff(grid_, kernel_ - other.kernel_);
  return diff.eigenvalues().cwiseAbs().sum();
}

DensityMatrix density_matrix(const MixedState& m) {
  require_1d(m.grid(), "density_matrix");
  std::vector<Trajectory> single;
  for (const auto& comp : m.components()) {
    Trajectory t;
    t.frames.push_back({0.0, comp.state, 1.0, 0.0, 0.0});
    single.push_back(std::move(t));
  }
  return snapshot(m, single, 0);
}

std::pair<MixedState, MixedState> equivalent_decompositions(const ComplexField& a,
                                                            const ComplexField& b, double angle) {
  require_1d(a.grid(), "equivalent_decompositions");
  if (!(a.grid() == b.grid())) throw std::invalid_argument("decomposition states differ in grid");
  if (std::abs(inner_product(a, b)) > 1e-10) {
    throw std::invalid_argument("decomposition states must be orthogonal");
  }
  for (const auto* psi : {&a, &b}) {
    if (std::abs(std::pow(l2_norm(*psi), 2) - 1.0) > 1e-10) {
      throw std::invalid_argument("decomposition states must be normalized");
    }
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  ComplexField u(a.grid()), w(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) {
    u[i] = c * a[i] + s * b[i];
    w[i] = -s * a[i] + c * b[i];
  }
  MixedState first({{0.5, a}, {0.5, b}});
  MixedState second({{0.5, std::move(u)}, {0.5, std::move(w)}});
  const double mismatch = density_matrix(first).max_difference(density_matrix(second));
  if (mismatch > 1e-12) {
    std::ostringstream msg;
    msg << "decompositions disagree on the density matrix by " << mismatch;
    throw InvariantError(msg.str());
  }
  return {std::move(first), std::move(second)};
}

std::pair<ComplexField, ComplexField> two_gaussian_pair(const Grid& grid, double separation,
                                                        double width) {
  require_1d(grid, "two_gaussian_pair");
  if (!(width > 0.0)) throw std::invalid_argument("two-gaussian width must be positive");
  const double mid = 0.5 * grid.length();
  auto gaussian = [&](double center) {
    ComplexField f = sample<Complex>(grid, [&](double x) {
      const double d = (x - center) / width;
      return Complex(std::exp(-0.5 * d * d), 0.0);
    });
    const double norm = l2_norm(f);
    for (auto& v : f) v /= norm;
    return f;
  };
  ComplexField a = gaussian(mid - 0.5 * separation);
  ComplexField b = gaussian(mid + 0.5 * separation);
  const Complex overlap = inner_product(a, b);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] -= overlap * a[i];
  const double norm = l2_norm(b);
  for (auto& v : b) v /= norm;
  return {std::move(a), std::move(b)};
}

std::pair<ComplexField, ComplexField> canonical_pair(const Grid& grid) {
  return two_gaussian_pair(grid, grid.length() / 4.0, grid.length() / 32.0);
}

std::vector<SeriesPoint> mixed_divergence(const NLSECoefficients& c, const Potential& v,
                                          const MixedState& a, const MixedState& b,
                                          const SimulationConfig& config) {
  require_1d(a.grid(), "mixed_divergence");
  const double initial = density_matrix(a).max_difference(density_matrix(b));
  if (initial > 1e-10) {
    std::ostringstream msg;
    msg << "decompositions do not share a density matrix (max difference " << initial << ")";
    throw InvariantError(msg.str());
  }
  const auto runs_a = evolve_components(c, v, a, config);
  const auto runs_b = evolve_components(c, v, b, config);
  std::vector<SeriesPoint> out;
  for (std::size_t n = 0; n < runs_a.front().frames.size(); ++n) {
    const DensityMatrix wa = snapshot(a, runs_a, n);
    const DensityMatrix wb = snapshot(b, runs_b, n);
    out.push_back({runs_a.front().frames[n].t, wa.frobenius_distance(wb)});
  }
  return out;
}

ComplexField tensor_product(const ComplexField& psi1, const ComplexField& psi2) {
  require_1d(psi1.grid(), "tensor_product");
  if (!(psi1.grid() == psi2.grid())) throw std::invalid_argument("tensor_product: grid mismatch");
  const Grid grid2 = psi1.grid().with_dimension(2);
  ComplexField out(grid2);
  const int n = grid2.points_per_axis();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = psi1[i] * psi2[j];
  return out;
}

RealField marginal_density(const ComplexField& psi2d) {
  if (psi2d.grid().dimension() != 2) throw std::invalid_argument("marginal_density needs 2D");
  const Grid grid1 = psi2d.grid().with_dimension(1);
  const int n = grid1.points_per_axis();
  RealField out(grid1);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += std::norm(psi2d.at(i, j));
    out[i] = sum * grid1.spacing();
  }
  return out;
}

Potential additive_potential(const Potential& v1, const Potential& v2) {
  require_1d(v1.values.grid(), "additive_potential");
  if (!(v1.values.grid() == v2.values.grid())) {
    throw std::invalid_argument("additive_potential: grid mismatch");
  }
  const Grid grid2 = v1.values.grid().with_dimension(2);
  RealField v(grid2);
  const int n = grid2.points_per_axis();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v.at(i, j) = v1.values[i] + v2.values[j];
  return {std::move(v)};
}

double SeparabilityReport::residual_sup() const {
  double m = 0.0;
  for (const auto& p : residual) m = std::max(m, p.value);
  return m;
}

SeparabilityReport separability_residual(const NLSECoefficients& c, const Potential& v1,
                                         const Potential& v2, const ComplexField& psi1,
                                         const ComplexField& psi2,
                                         const SimulationConfig& config) {
  const ComplexField joint = tensor_product(psi1, psi2);
  const Potential v = additive_potential(v1, v2);
  // The 2D phase anchor is the sum of the factor anchors, so the alpha2 term
  // sees arg psi1 + arg psi2 on the same branch as the factor runs.
  const double anchor = std::arg(psi1[0]) + std::arg(psi2[0]);

  auto run_x = std::async(std::launch::async, [&] { return evolve(c, v1, psi1, config); });
  auto run_y = std::async(std::launch::async, [&] { return evolve(c, v2, psi2, config); });
  const Trajectory joint_run = evolve(c, v, joint, config, anchor);
  const Trajectory x_run = run_x.get();
  const Trajectory y_run = run_y.get();

  SeparabilityReport report;
  for (std::size_t n = 0; n < joint_run.frames.size(); ++n) {
    const ComplexField& psi = joint_run.frames[n].psi;
    const ComplexField product = tensor_product(x_run.frames[n].psi, y_run.frames[n].psi);
    report.residual.push_back({joint_run.frames[n].t, l2_distance(psi, product)});
    const RealField marginal = marginal_density(psi);
    const RealField rho_x = density(x_run.frames[n].psi);
    for (std::size_t i = 0; i < marginal.size(); ++i) {
      report.marginal_density_sup =
          std::max(report.marginal_density_sup, std::abs(marginal[i] - rho_x[i]));
    }
  }
  return report;
}

}  // namespace nlgauge
