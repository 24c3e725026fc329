#include <doctest.h>

#include <cmath>
#include <random>

#include "nlgauge/equivalence.hpp"
#include "oracles.hpp"

using namespace nlgauge;

namespace {

NLSECoefficients random_coefficients(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::array<double, 10> a{};
  for (auto& v : a) v = u(rng);
  a[0] = -0.5 + 0.2 * u(rng);
  return NLSECoefficients::from_array(a);
}

GaugeTransform random_gauge(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> gamma(-2.0, 2.0), mag(0.5, 2.0);
  std::bernoulli_distribution flip;
  return {gamma(rng), flip(rng) ? -mag(rng) : mag(rng)};
}

double scale(const NLSECoefficients& c) {
  double m = 1.0;
  for (double v : c.as_array()) m = std::max(m, std::abs(v));
  return m;
}

SimulationConfig run_config(const Grid& grid, const std::vector<NLSECoefficients>& cs, double t,
                            int frames) {
  double bound = INFINITY;
  for (const auto& c : cs) bound = std::min(bound, SimulationConfig::stability_bound(grid, c));
  SimulationConfig cfg;
  const int steps = static_cast<int>(std::ceil(t / (0.5 * bound) / frames)) * frames;
  cfg.dt = t / steps;
  cfg.t_final = t;
  cfg.output_every = steps / frames;
  return cfg;
}

}  // namespace

TEST_CASE("identity gauge leaves coefficients unchanged") {
  const auto lin = push_forward_linear(0.0, 1.0, -0.5, 1.3);
  CHECK(lin == NLSECoefficients::linear(-0.5, 1.3));
  std::mt19937_64 rng(1);
  const auto c = random_coefficients(rng);
  CHECK(max_difference(push_forward_family(GaugeTransform::identity(), c), c) == 0.0);
}

TEST_CASE("a pure gamma gauge introduces a diffusion term") {
  const auto c = push_forward_linear(0.8, 1.0, -0.5, 0.0);
  CHECK(c.nu2 != 0.0);
  CHECK(c.nu2 + c.nu1 * c.mu1 == doctest::Approx(0.0));
}

TEST_CASE("gauged linear equations satisfy the linearizability predicate") {
  for (double gamma : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    for (double lambda : {-1.0, 0.5, 2.0, 3.0}) {
      const auto c = push_forward_linear(gamma, lambda, -0.5, 0.7);
      CHECK(in_linearizable_family(c));
      CHECK(max_difference(push_forward_family(GaugeTransform(gamma, lambda),
                                               NLSECoefficients::linear(-0.5, 0.7)),
                           c) == 0.0);
    }
  }
  NLSECoefficients generic;
  generic.mu3 = 0.1;
  CHECK_FALSE(in_linearizable_family(generic));
  NLSECoefficients broken = push_forward_linear(1.0, 2.0, -0.5, 0.0);
  broken.mu5 += 0.01;
  CHECK_FALSE(in_linearizable_family(broken));
}

TEST_CASE("push-forward is a group action") {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 50; ++n) {
    const auto c = random_coefficients(rng);
    const auto g1 = random_gauge(rng), g2 = random_gauge(rng);
    const auto stepwise = push_forward_family(g2, push_forward_family(g1, c));
    const auto direct = push_forward_family(compose(g2, g1), c);
    CHECK(max_difference(stepwise, direct) <= 1e-12 * scale(direct));
    const auto back = push_forward_family(invert(g1), push_forward_family(g1, c));
    CHECK(max_difference(back, c) <= 1e-12 * scale(c));
  }
}

TEST_CASE("nu2 + nu1 mu1 is gauge invariant") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const auto c = random_coefficients(rng);
    const auto p = push_forward_family(random_gauge(rng), c);
    CHECK(p.nu2 + p.nu1 * p.mu1 == doctest::Approx(c.nu2 + c.nu1 * c.mu1).epsilon(1e-12));
  }
}

TEST_CASE("push-forward preconditions") {
  CHECK_THROWS_AS(push_forward_linear(1.0, 0.0, -0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(push_forward_family(GaugeTransform(1.0, 2.0, 0.3), NLSECoefficients::linear()),
                  std::invalid_argument);
}

TEST_CASE("pushed coefficients match the flow of the gauged field instantaneously") {
  std::mt19937_64 rng(4);
  const Grid g = Grid::make(1, 64, 20.0);
  const auto psi = oracle::normalized(oracle::bump(g, 10.0, 2.0));
  for (int n = 0; n < 18; ++n) {
    const auto c = random_coefficients(rng);
    const auto gauge = random_gauge(rng);
    const auto pushed = push_forward_family(gauge, c);
    const double good = oracle::instantaneous_mismatch(gauge, c, pushed, psi, 1e-4);
    // Every coefficient except mu0, which multiplies the zero potential.
    constexpr int kIndices[] = {0, 1, 3, 4, 5, 6, 7, 8, 9};
    const int k = kIndices[n % 9];
    auto wrong = pushed.as_array();
    wrong[k] += 0.1 * std::max(0.1, std::abs(wrong[k]));
    const double bad =
        oracle::instantaneous_mismatch(gauge, c, NLSECoefficients::from_array(wrong), psi, 1e-4);
    CHECK(good <= 1e-6);
    CHECK(bad >= 100.0 * good);
  }
}

TEST_CASE("identity gauge commuting residual vanishes") {
  const Grid g = Grid::make(1, 64, 20.0);
  const auto psi = oracle::normalized(oracle::bump(g, 10.0, 2.0));
  NLSECoefficients c;
  c.nu2 = 0.05;
  c.mu1 = 0.1;
  c.alpha1 = 0.2;
  const auto cfg = run_config(g, {c}, 0.5, 5);
  const auto report = commuting_residual(GaugeTransform::identity(), c, psi, Potential::zero(g), cfg);
  CHECK(report.residual_sup <= 1e-12);
  CHECK(report.residual_series.front().t == 0.0);
  CHECK(report.residual_series.front().value <= 1e-12);
  CHECK_FALSE(report.near_node());
}

TEST_CASE("linear equation under a phase dilation") {
  const Grid g = Grid::make(1, 64, 20.0);
  const auto psi = oracle::normalized(oracle::bump(g, 10.0, 2.0));
  const auto c = NLSECoefficients::linear();
  const GaugeTransform gauge(0.0, 2.0);
  const auto pushed = push_forward_family(gauge, c);
  const auto cfg = run_config(g, {c, pushed}, 1.0, 10);
  const auto report = commuting_residual(gauge, c, psi, Potential::zero(g), cfg);
  CHECK(report.refined_residual_sup < report.residual_sup);
  CHECK(report.refinement_order >= 1.5);
  CHECK(report.density_sup <= 1e-6);

  auto wrong = pushed;
  wrong.mu2 *= 1.1;
  const auto control = commuting_residual_with(gauge, c, wrong, psi, Potential::zero(g), cfg);
  CHECK(control.residual_sup >= 10.0 * report.residual_sup);
}
