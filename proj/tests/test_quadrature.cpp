#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lpq/quadrature.hpp"

using namespace lpq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("integrate classic shapes") {
  auto exp2 = integrate([](double x) { return std::exp(-2.0 * x); }, 0.0, inf);
  REQUIRE(!exp2.infinite());
  CHECK_THAT(exp2.value, WithinRel(0.5, 1e-6));

  auto cube = integrate([](double x) { return std::pow(x, -3.0); }, 1.0, inf);
  REQUIRE(!cube.infinite());
  CHECK_THAT(cube.value, WithinRel(0.5, 1e-6));
  CHECK_THAT(cube.endpoint_exponents.second, WithinAbs(-3.0, 0.1));

  auto gam3 = integrate([](double x) { return x * x * std::exp(-x); }, 0.0, inf);
  CHECK_THAT(gam3.value, WithinRel(2.0, 1e-6));
}

TEST_CASE("integrate flags harmonic divergence at the lower end") {
  auto r = integrate([](double x) { return 1.0 / x; }, 0.0, 1.0);
  CHECK(r.infinite());
  CHECK(r.diverges == DivergeAt::Lower);
  CHECK(std::isinf(r.value));
  CHECK_THAT(r.endpoint_exponents.first, WithinAbs(-1.0, 0.05));
}

TEST_CASE("integrate flags power divergences") {
  auto a = integrate([](double x) { return std::pow(x, -1.5); }, 0.0, 1.0);
  CHECK(a.diverges == DivergeAt::Lower);
  auto b = integrate([](double x) { return 1.0 / x; }, 1.0, inf);
  CHECK(b.diverges == DivergeAt::Upper);
  auto c = integrate([](double x) { return std::pow(x, -0.5); }, 1.0, inf);
  CHECK(c.diverges == DivergeAt::Upper);
}

TEST_CASE("integrate handles zero and compact support") {
  auto z = integrate([](double) { return 0.0; }, 0.0, inf);
  CHECK(z.value == 0.0);
  CHECK(!z.infinite());

  auto box = integrate([](double x) { return x >= 1.0 && x < 2.0 ? 1.0 : 0.0; },
                       0.0, inf, 1e-8, {1.0, 2.0});
  CHECK_THAT(box.value, WithinRel(1.0, 1e-8));
}

TEST_CASE("integrate aborts on a NaN integrand") {
  CHECK_THROWS_AS(
      integrate([](double x) { return x < 0.5 ? std::nan("") : 1.0; }, 0.25, 1.0),
      std::runtime_error);
}

TEST_CASE("random power integrands match their antiderivatives") {
  std::mt19937 rng(0x5EED);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double c = 0.2 + 3.0 * U(rng);
    const double a = -0.9 + 3.9 * U(rng);
    auto r = integrate([=](double x) { return c * std::pow(x, a); }, 0.0, 1.0);
    REQUIRE(!r.infinite());
    CHECK_THAT(r.value, WithinRel(c / (a + 1.0), 1e-7));
  }
  for (int i = 0; i < 100; ++i) {
    const double c = 0.2 + 3.0 * U(rng);
    const double b = 1.1 + 3.0 * U(rng);
    auto r = integrate([=](double x) { return c * std::pow(x, -b); }, 1.0, inf);
    REQUIRE(!r.infinite());
    CHECK_THAT(r.value, WithinRel(c / (b - 1.0), 1e-7));
  }
}

TEST_CASE("sup of the plateau criterion shape") {
  // t^{-1/2} min(t,1)^{1/2}: identically 1 on (0,1], decays beyond
  auto f = [](double t) { return std::pow(t, -0.5) * std::sqrt(std::min(t, 1.0)); };
  auto s = sup_on_interval(f, 0.0, inf);
  CHECK_THAT(s.value, WithinAbs(1.0, 1e-9));
  CHECK(s.plateau);
  CHECK(s.argmax <= 1e-8);  // smallest sampled plateau point
}

TEST_CASE("sup with an interior calculus maximum") {
  auto f = [](double t) { return t > 1.0 ? std::sqrt(t - 1.0) / t : 0.0; };
  auto s = sup_on_interval(f, 0.0, inf);
  CHECK_THAT(s.value, WithinRel(0.5, 1e-9));
  CHECK_THAT(s.argmax, WithinRel(2.0, 1e-4));
  CHECK(!s.plateau);
}

TEST_CASE("sup of zero is zero with a plateau") {
  auto s = sup_on_interval([](double) { return 0.0; }, 0.0, inf);
  CHECK(s.value == 0.0);
  CHECK(s.plateau);
}

TEST_CASE("sup never loses to its own samples") {
  std::mt19937 rng(0xABCD);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double peak = 0.1 * std::pow(10.0, 2.0 * U(rng));
    const double width = 0.5 + 2.0 * U(rng);
    auto f = [=](double t) {
      const double x = std::log(t / peak) / width;
      return std::exp(-x * x);
    };
    auto s = sup_on_interval(f, 0.0, inf);
    for (long k = -576; k <= 576; ++k) {
      const double t = std::pow(10.0, (double)k / 64.0);
      CHECK(s.value >= f(t) * (1.0 - 1e-12));
    }
    CHECK_THAT(s.value, WithinRel(1.0, 1e-8));
    CHECK_THAT(s.argmax, WithinRel(peak, 1e-4));
  }
}

TEST_CASE("sup detects growth into an open endpoint") {
  auto s = sup_on_interval([](double t) { return 1.0 / t; }, 0.0, inf);
  CHECK(std::isinf(s.value));
  CHECK(s.at_endpoint == DivergeAt::Lower);

  auto u = sup_on_interval([](double t) { return std::sqrt(t); }, 0.0, inf);
  CHECK(std::isinf(u.value));
  CHECK(u.at_endpoint == DivergeAt::Upper);

  // bounded monotone approach stays finite
  auto b = sup_on_interval([](double t) { return t / (1.0 + t); }, 0.0, inf);
  CHECK(std::isfinite(b.value));
  CHECK_THAT(b.value, WithinAbs(1.0, 1e-6));
}

TEST_CASE("sup respects hint points") {
  // spike supported far outside the default span
  auto f = [](double t) { return t >= 1e-14 && t < 1e-13 ? 2.0 : 0.0; };
  auto s = sup_on_interval(f, 0.0, inf, 64, {3e-14});
  CHECK(s.value == 2.0);
}

TEST_CASE("limit probe classifies power decay") {
  auto v = limit_probe([](double t) { return std::sqrt(t); }, 0.0, inf,
                       DivergeAt::Lower);
  CHECK(v.kind == LimitKind::Zero);
  CHECK_THAT(v.fitted_exponent, WithinAbs(0.5, 0.05));
  CHECK(v.samples.size() == 12);
}

TEST_CASE("limit probe recognizes a plateau value") {
  auto f = [](double t) { return std::pow(t, -0.5) * std::sqrt(std::min(t, 1.0)); };
  auto v = limit_probe(f, 0.0, inf, DivergeAt::Lower);
  CHECK(v.kind == LimitKind::Positive);
  CHECK_THAT(v.c, WithinRel(1.0, 1e-6));

  auto c = limit_probe([](double) { return 3.0; }, 0.0, inf, DivergeAt::Upper);
  CHECK(c.kind == LimitKind::Positive);
  CHECK_THAT(c.c, WithinRel(3.0, 1e-9));
}

TEST_CASE("limit probe recognizes blow-up") {
  auto v = limit_probe([](double t) { return std::pow(t, -0.1); }, 0.0, inf,
                       DivergeAt::Lower);
  CHECK(v.kind == LimitKind::Infinite);
}

TEST_CASE("limit probe on compact support returns zero at both ends") {
  auto f = [](double t) { return t >= 1.0 && t < 2.0 ? 5.0 : 0.0; };
  CHECK(limit_probe(f, 0.0, inf, DivergeAt::Lower).kind == LimitKind::Zero);
  CHECK(limit_probe(f, 0.0, inf, DivergeAt::Upper).kind == LimitKind::Zero);
}

TEST_CASE("limit probe toward a finite endpoint") {
  // A-type criterion on a bounded interval vanishing at the right end
  auto f = [](double t) { return std::sqrt(std::max(1.0 - t, 0.0)); };
  auto v = limit_probe(f, 0.0, 1.0, DivergeAt::Upper);
  CHECK(v.kind == LimitKind::Zero);
  CHECK_THAT(v.fitted_exponent, WithinAbs(0.5, 0.05));
}

TEST_CASE("limit probe toward infinity with slow decay stays sound") {
  auto v = limit_probe([](double t) { return std::pow(t, -0.3); }, 0.0, inf,
                       DivergeAt::Upper);
  CHECK(v.kind == LimitKind::Zero);
  CHECK_THAT(v.fitted_exponent, WithinAbs(0.3, 0.05));
}
