#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlgauge/ensembles.hpp"
#include "nlgauge/errors.hpp"
#include "oracles.hpp"

using namespace nlgauge;
using oracle::pi;

namespace {

SimulationConfig make_config(double dt, double t_final, int output_every) {
  SimulationConfig cfg;
  cfg.dt = dt;
  cfg.t_final = t_final;
  cfg.output_every = output_every;
  return cfg;
}

double peak(const std::vector<SeriesPoint>& s) {
  double m = 0.0;
  for (const auto& p : s) m = std::max(m, p.value);
  return m;
}

}  // namespace

TEST_CASE("pure state density matrix is a rank-one projector") {
  const Grid g = Grid::make(1, 64, 20.0);
  const auto psi = oracle::normalized(oracle::gaussian(g, 10.0, 1.0, 0.5));
  const auto w = density_matrix(MixedState({{1.0, psi}}));
  CHECK(w.trace() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.hermiticity_error() <= 1e-12);
  const auto ev = w.eigenvalues();
  CHECK(ev[ev.size() - 1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(ev[ev.size() - 2]) <= 1e-12);
  CHECK(w.min_eigenvalue() >= -1e-10);
  // Direct kernel oracle.
  for (int i = 0; i < 64; i += 7)
    for (int j = 0; j < 64; j += 5) CHECK(std::abs(w.kernel()(i, j) - psi[i] * std::conj(psi[j])) <= 1e-15);
}

TEST_CASE("equal mixture of orthonormal states has eigenvalues one half") {
  const Grid g = Grid::make(1, 128, 40.0);
  const auto [a, b] = canonical_pair(g);
  CHECK(std::abs(inner_product(a, b)) <= 1e-12);
  const auto w = density_matrix(MixedState({{0.5, a}, {0.5, b}}));
  const auto ev = w.eigenvalues();
  CHECK(ev[ev.size() - 1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(ev[ev.size() - 2] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(w.trace() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("equivalent decompositions") {
  const Grid g = Grid::make(1, 128, 40.0);
  const auto [a, b] = canonical_pair(g);
  {
    const auto [first, second] = equivalent_decompositions(a, b, 0.0);
    for (int j = 0; j < 2; ++j)
      CHECK(max_abs_difference(first.components()[j].state, second.components()[j].state) == 0.0);
  }
  {
    const auto [first, second] = equivalent_decompositions(a, b, pi / 4);
    CHECK(density_matrix(first).max_difference(density_matrix(second)) <= 1e-12);
  }
  {
    const auto [first, second] = equivalent_decompositions(a, b, pi / 2);
    auto minus_a = a;
    for (auto& v : minus_a) v = -v;
    CHECK(max_abs_difference(second.components()[0].state, b) <= 1e-15);
    CHECK(max_abs_difference(second.components()[1].state, minus_a) <= 1e-15);
  }
  const auto c = oracle::normalized(oracle::gaussian(g, 21.0, 1.0));
  CHECK_THROWS_AS(equivalent_decompositions(a, c, 0.3), std::invalid_argument);
}

TEST_CASE("density matrix ignores per-component phases") {
  const Grid g = Grid::make(1, 64, 40.0);
  const auto [a, b] = canonical_pair(g);
  auto ra = a, rb = b;
  for (auto& v : ra) v *= std::polar(1.0, 0.4);
  for (auto& v : rb) v *= std::polar(1.0, -2.0);
  const auto w1 = density_matrix(MixedState({{0.3, a}, {0.7, b}}));
  const auto w2 = density_matrix(MixedState({{0.3, ra}, {0.7, rb}}));
  CHECK(w1.max_difference(w2) <= 1e-15);
  CHECK(w1.frobenius_distance(w2) <= 1e-15);
}

TEST_CASE("mixed state validation") {
  const Grid g = Grid::make(1, 64, 40.0);
  const auto [a, b] = canonical_pair(g);
  CHECK_THROWS_AS(MixedState({}), std::invalid_argument);
  CHECK_THROWS_AS(MixedState({{0.5, a}, {0.4, b}}), std::invalid_argument);
  CHECK_THROWS_AS(MixedState({{-0.5, a}, {1.5, b}}), std::invalid_argument);
  auto big = a;
  for (auto& v : big) v *= 1.1;
  CHECK_THROWS_AS(MixedState({{1.0, big}}), std::invalid_argument);
  const auto other = oracle::normalized(oracle::gaussian(Grid::make(1, 32, 40.0), 20.0, 2.0));
  CHECK_THROWS_AS(MixedState({{0.5, a}, {0.5, other}}), std::invalid_argument);
}

TEST_CASE("trace distance between orthogonal pure states") {
  const Grid g = Grid::make(1, 64, 40.0);
  const auto [a, b] = canonical_pair(g);
  const auto wa = density_matrix(MixedState({{1.0, a}}));
  const auto wb = density_matrix(MixedState({{1.0, b}}));
  CHECK(wa.trace_distance(wb) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(wa.frobenius_distance(wb) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("decomposition divergence") {
  const Grid g = Grid::make(1, 128, 40.0);
  const auto [a, b] = canonical_pair(g);
  const auto [first, second] = equivalent_decompositions(a, b, pi / 4);
  const auto cfg = make_config(2e-3, 0.5, 25);
  const auto v = Potential::zero(g);

  const auto same = mixed_divergence(NLSECoefficients::linear(), v, first, first, cfg);
  CHECK(peak(same) == 0.0);
  const auto linear = mixed_divergence(NLSECoefficients::linear(), v, first, second, cfg);
  CHECK(peak(linear) <= 1e-9);
  NLSECoefficients log_c;
  log_c.alpha1 = 1.0;
  const auto nonlinear = mixed_divergence(log_c, v, first, second, cfg);
  CHECK(peak(nonlinear) > 100.0 * peak(linear));
  CHECK(nonlinear.front().value <= 1e-12);

  const auto shifted = two_gaussian_pair(g, 8.0, 1.0);
  const MixedState unrelated({{0.5, shifted.first}, {0.5, shifted.second}});
  CHECK_THROWS_AS(mixed_divergence(log_c, v, first, unrelated, cfg), InvariantError);
}

TEST_CASE("tensor products") {
  const Grid g = Grid::make(1, 32, 8.0);
  const auto psi1 = oracle::normalized(oracle::gaussian(g, 4.0, 1.0, 0.3));
  const auto flat = sample<Complex>(g, [&](double) { return Complex(1.0 / std::sqrt(8.0)); });
  const auto prod = tensor_product(psi1, flat);
  CHECK(prod.grid().dimension() == 2);
  const auto marginal = marginal_density(prod);
  for (std::size_t i = 0; i < psi1.size(); ++i) CHECK(marginal[i] == doctest::Approx(std::norm(psi1[i])).epsilon(1e-13));

  auto half = psi1;
  for (auto& v : half) v *= 0.5;
  CHECK(l2_norm(tensor_product(half, psi1)) == doctest::Approx(0.5).epsilon(1e-13));

  const double k = 2 * pi / 8.0, q = 3 * 2 * pi / 8.0;
  const auto wx = sample<Complex>(g, [&](double x) { return std::polar(1.0, k * x); });
  const auto wy = sample<Complex>(g, [&](double y) { return std::polar(1.0, q * y); });
  const auto joint = sample<Complex>(g.with_dimension(2), [&](double x, double y) { return std::polar(1.0, k * x + q * y); });
  CHECK(max_abs_difference(tensor_product(wx, wy), joint) <= 1e-14);
  CHECK_THROWS_AS(tensor_product(prod, psi1), std::invalid_argument);
}

TEST_CASE("additive potential") {
  const Grid g = Grid::make(1, 16, 4.0);
  const Potential v1{sample<double>(g, [](double x) { return x; })};
  const Potential v2{sample<double>(g, [](double x) { return x * x; })};
  const auto v = additive_potential(v1, v2);
  CHECK(v.values.at(3, 5) == doctest::Approx(v1.values[3] + v2.values[5]));
}

TEST_CASE("linear dynamics keeps product states separable") {
  const Grid g = Grid::make(1, 64, 20.0);
  const auto psi1 = oracle::normalized(oracle::gaussian(g, 8.0, 1.5, 1.0));
  const auto psi2 = oracle::normalized(oracle::gaussian(g, 10.0, 2.0));
  const Potential v1{sample<double>(g, [](double x) { return 0.02 * (x - 10) * (x - 10); })};
  const auto report = separability_residual(NLSECoefficients::linear(-0.5, 1.0), v1,
                                            Potential::zero(g), psi1, psi2,
                                            make_config(5e-3, 0.5, 20));
  CHECK(report.residual_sup() <= 1e-8);
  CHECK(report.marginal_density_sup <= 1e-8);
}

TEST_CASE("full family stays separable up to solver error") {
  const Grid g = Grid::make(1, 64, 20.0);
  const auto psi1 = oracle::normalized(oracle::bump(g, 10.0, 2.5, 1));
  const auto psi2 = oracle::normalized(oracle::bump(g, 10.0, 3.0));
  NLSECoefficients c;
  c.nu2 = c.mu1 = c.mu2 = c.mu3 = c.mu4 = c.mu5 = c.alpha1 = c.alpha2 = 0.05;
  const auto v = Potential::zero(g);
  const auto coarse = separability_residual(c, v, v, psi1, psi2, make_config(0.02, 0.5, 5));
  const auto fine = separability_residual(c, v, v, psi1, psi2, make_config(0.01, 0.5, 10));
  CHECK(fine.residual_sup() < coarse.residual_sup());
  CHECK(std::log2(coarse.residual_sup() / fine.residual_sup()) >= 3.0);
  CHECK(fine.marginal_density_sup <= 1e-8);
}
