#include <doctest.h>

#include <cmath>
#include <random>

#include "nlgauge/gauge.hpp"
#include "oracles.hpp"

using namespace nlgauge;

namespace {

const RegularizationPolicy policy{};

GaugeTransform random_gauge(std::mt19937_64& rng, double gamma_max = 1.0) {
  std::uniform_real_distribution<double> gamma(-gamma_max, gamma_max);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::uniform_real_distribution<double> theta(-1.0, 1.0);
  std::bernoulli_distribution flip;
  const double lambda = flip(rng) ? -mag(rng) : mag(rng);
  return {gamma(rng), lambda, theta(rng)};
}

double max_density_change(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(std::norm(a[i]) - std::norm(b[i])));
  return m;
}

}  // namespace

TEST_CASE("identity and constant phase gauges") {
  std::mt19937_64 rng(1);
  const Grid g = Grid::make(1, 32, 5.0);
  const auto psi = oracle::random_nodeless(g, rng);
  CHECK(max_abs_difference(apply_gauge(GaugeTransform::identity(), psi, policy).field, psi) <= 1e-15);
  const auto shifted = apply_gauge(GaugeTransform(0.0, 1.0, 0.7), psi, policy).field;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    CHECK(std::abs(shifted[i] - std::polar(1.0, 0.7) * psi[i]) <= 1e-15);
  }
}

TEST_CASE("gamma acts through ln R") {
  const Grid g = Grid::make(1, 16, 1.0);
  const auto two = sample<Complex>(g, [](double) { return Complex(2.0, 0.0); });
  const auto out = apply_gauge(GaugeTransform(1.0, 1.0), two, policy).field;
  for (const auto& v : out) CHECK(std::abs(v - 2.0 * std::polar(1.0, std::log(2.0))) <= 1e-15);
}

TEST_CASE("lambda scales the phase") {
  const Grid g = Grid::make(1, 64, 10.0);
  const double k = 2 * oracle::pi / 10.0;
  const auto wave = sample<Complex>(g, [&](double x) { return std::polar(1.0, k * x); });
  const auto out = apply_gauge(GaugeTransform(0.0, 1.5), wave, policy).field;
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(out[i] - std::polar(1.0, 1.5 * k * g.coordinate(i))) <= 1e-13);
  }
}

TEST_CASE("position-dependent theta") {
  const Grid g = Grid::make(1, 32, 4.0);
  const auto psi = oracle::normalized(oracle::bump(g, 2.0, 0.7));
  const auto theta = sample<double>(g, [](double x) { return std::sin(x); });
  const auto out = apply_gauge(GaugeTransform(0.0, 1.0, PositionPhase(theta)), psi, policy).field;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    CHECK(std::abs(out[i] - std::polar(1.0, theta[i]) * psi[i]) <= 1e-15);
  }
}

TEST_CASE("composition law at parameter level") {
  const auto c = compose(GaugeTransform(3.0, 2.0), GaugeTransform(1.0, 5.0));
  CHECK(c.gamma() == 5.0);
  CHECK(c.lambda() == 10.0);
  CHECK(c.theta().is_zero());

  const GaugeTransform g(0.4, -1.7, 0.2);
  CHECK(parameter_distance(compose(GaugeTransform::identity(), g), g) == 0.0);
  CHECK(parameter_distance(compose(g, GaugeTransform::identity()), g) == 0.0);

  const GaugeTransform a(1.0, 2.0, 0.5), b(-0.5, 3.0, 1.0);
  const auto ab = compose(a, b);
  CHECK(ab.theta().at(0) == doctest::Approx(2.0 * 1.0 + 0.5));
}

TEST_CASE("inverse examples") {
  const auto inv = invert(GaugeTransform(1.0, 2.0));
  CHECK(inv.gamma() == -0.5);
  CHECK(inv.lambda() == 0.5);
  CHECK(inv.theta().is_zero());
  const auto flip = invert(GaugeTransform(0.0, -1.0));
  CHECK(flip.gamma() == 0.0);
  CHECK(flip.lambda() == -1.0);
}

TEST_CASE("group axioms on random parameters") {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 50; ++n) {
    const auto a = random_gauge(rng), b = random_gauge(rng), c = random_gauge(rng);
    CHECK(parameter_distance(compose(compose(a, b), c), compose(a, compose(b, c))) <= 1e-14);
    CHECK(parameter_distance(compose(a, invert(a)), GaugeTransform::identity()) <= 1e-14);
    CHECK(parameter_distance(compose(invert(a), a), GaugeTransform::identity()) <= 1e-14);
    CHECK(parameter_distance(invert(invert(a)), a) <= 1e-14);
  }
}

TEST_CASE("applying a composition equals applying in sequence") {
  std::mt19937_64 rng(10);
  for (int dim : {1, 2}) {
    const Grid g = Grid::make(dim, 32, 6.0);
    for (int n = 0; n < 10; ++n) {
      const auto psi = oracle::random_nodeless(g, rng);
      const auto g1 = random_gauge(rng, 2.0), g2 = random_gauge(rng, 2.0);
      const auto first = apply_gauge(g1, psi, policy);
      const auto twice = apply_gauge(g2, first.field, policy, first.phase_anchor).field;
      const auto once = apply_gauge(compose(g2, g1), psi, policy).field;
      CHECK(max_abs_difference(twice, once) <= 1e-10);
    }
  }
}

TEST_CASE("applying the inverse restores the field") {
  std::mt19937_64 rng(12);
  const Grid g = Grid::make(1, 64, 6.0);
  for (int n = 0; n < 10; ++n) {
    const auto psi = oracle::random_nodeless(g, rng);
    const auto gauge = random_gauge(rng, 3.0);
    const auto there = apply_gauge(gauge, psi, policy);
    const auto back = apply_gauge(invert(gauge), there.field, policy, there.phase_anchor);
    CHECK(max_abs_difference(back.field, psi) <= 1e-12);
    CHECK(back.phase_anchor == doctest::Approx(std::arg(psi[0])).epsilon(1e-12));
  }
}

TEST_CASE("field-valued theta composes like a constant") {
  std::mt19937_64 rng(13);
  const Grid g = Grid::make(1, 32, 6.0);
  const auto psi = oracle::random_nodeless(g, rng);
  const auto t1 = sample<double>(g, [](double x) { return 0.3 * std::cos(x); });
  const auto t2 = sample<double>(g, [](double x) { return -0.2 * std::sin(2 * x); });
  const GaugeTransform g1(0.5, 1.5, PositionPhase(t1)), g2(-0.7, -0.8, PositionPhase(t2));
  const auto first = apply_gauge(g1, psi, policy);
  const auto twice = apply_gauge(g2, first.field, policy, first.phase_anchor).field;
  CHECK(max_abs_difference(twice, apply_gauge(compose(g2, g1), psi, policy).field) <= 1e-10);
  CHECK(parameter_distance(compose(g1, invert(g1)), GaugeTransform::identity()) <= 1e-15);
}

TEST_CASE("density and norm are unchanged by every gauge") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> gamma(-5.0, 5.0), mag(0.1, 10.0);
  const Grid g = Grid::make(1, 64, 2 * oracle::pi);
  const auto with_nodes = sample<Complex>(g, [](double x) { return Complex(std::sin(x), std::sin(2 * x)); });
  for (int n = 0; n < 20; ++n) {
    const auto psi = n % 2 ? oracle::random_nodeless(g, rng) : with_nodes;
    const GaugeTransform gauge(gamma(rng), n % 3 ? mag(rng) : -mag(rng), gamma(rng));
    const auto out = apply_gauge(gauge, psi, policy);
    double rho_max = 0.0;
    for (const auto& v : psi) rho_max = std::max(rho_max, std::norm(v));
    CHECK(max_density_change(out.field, psi) <= 1e-12 * rho_max);
    CHECK(l2_norm(out.field) == doctest::Approx(l2_norm(psi)).epsilon(1e-14));
  }
  const auto out = apply_gauge(GaugeTransform(1.0, 2.0), with_nodes, policy);
  CHECK(out.warning());
  CHECK(all_finite(out.field));
}

TEST_CASE("gauge parameters are validated") {
  CHECK_THROWS_AS(GaugeTransform(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GaugeTransform(NAN, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaugeTransform(0.0, INFINITY), std::invalid_argument);
  CHECK_THROWS_AS(GaugeTransform(0.0, 1.0, NAN), std::invalid_argument);
}

TEST_CASE("position phase helpers") {
  const Grid g = Grid::make(1, 8, 1.0);
  const PositionPhase c(0.5);
  CHECK(c.is_constant());
  CHECK_FALSE(c.is_zero());
  CHECK(c.scaled(2.0).at(3) == 1.0);
  const PositionPhase f(sample<double>(g, [](double x) { return x; }));
  CHECK_FALSE(f.is_constant());
  CHECK(f.plus(c).at(4) == doctest::Approx(1.0));
  CHECK(f.max_difference(c) == doctest::Approx(0.5));
}
