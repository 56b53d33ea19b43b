#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "lpq/criteria.hpp"
#include "lpq/discretize.hpp"
#include "lpq/normest.hpp"
#include "lpq/weight.hpp"

using namespace lpq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Matrix mat(std::size_t r, std::size_t c, std::vector<double> entries) {
  Matrix m = Matrix::zeros(r, c);
  m.a = std::move(entries);
  return m;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix m = Matrix::zeros(r, c);
  for (auto& x : m.a) {
    const double u = unif(rng);
    x = u < 0.25 ? 0.0 : unif(rng);
  }
  return m;
}

double recomputed(const Matrix& a, const NormEstimate& est, double p, double q) {
  const double fn = vec_norm(est.extremal, p);
  if (fn == 0.0) return 0.0;
  return vec_norm(matvec(a, est.extremal), q) / fn;
}

}  // namespace

TEST_CASE("norm estimation rejects bad input") {
  const Matrix a = mat(2, 2, {1.0, 0.0, 0.0, 1.0});
  CHECK_THROWS_AS(norm_estimate(a, 0.5, 2.0), ParamError);
  CHECK_THROWS_AS(norm_estimate(a, 2.0, 0.0), ParamError);
  CHECK_THROWS_AS(norm_estimate(a, 2.0, -1.0), ParamError);
  CHECK_THROWS_AS(norm_estimate(a, std::nan(""), 2.0), ParamError);
  CHECK_THROWS_AS(norm_estimate(mat(1, 2, {1.0, -0.5}), 2.0, 2.0), ParamError);
  CHECK_THROWS_AS(brute_force_norm(Matrix::zeros(2, 4), 2.0, 2.0), ParamError);
}

TEST_CASE("scalar matrix has its entry as norm for every exponent pair") {
  const Matrix a = mat(1, 1, {3.0});
  for (double p : {1.0, 2.0, inf})
    for (double q : {0.5, 1.0, 2.0, inf}) {
      const auto est = norm_estimate(a, p, q);
      CHECK_THAT(est.lower_bound, WithinRel(3.0, 1e-12));
      CHECK_THAT(brute_force_norm(a, p, q), WithinRel(3.0, 1e-12));
    }
}

TEST_CASE("closed-form corners") {
  SECTION("p = 1 takes the best column") {
    const auto est = norm_estimate(mat(2, 2, {1.0, 2.0, 2.0, 1.0}), 1.0, 2.0);
    CHECK_THAT(est.lower_bound, WithinRel(std::sqrt(5.0), 1e-12));
    CHECK(est.method == NormMethod::ExactColumn);
    CHECK(est.converged);
  }
  SECTION("p = 1, q = inf is the largest entry") {
    const auto est = norm_estimate(mat(2, 2, {1.0, 2.0, 3.0, 4.0}), 1.0, inf);
    CHECK_THAT(est.lower_bound, WithinRel(4.0, 1e-12));
  }
  SECTION("q = inf takes the best row in the dual norm") {
    const auto est = norm_estimate(mat(2, 2, {1.0, 2.0, 3.0, 4.0}), 2.0, inf);
    CHECK_THAT(est.lower_bound, WithinRel(5.0, 1e-12));
    CHECK(est.method == NormMethod::ExactRow);
    CHECK_THAT(recomputed(mat(2, 2, {1.0, 2.0, 3.0, 4.0}), est, 2.0, inf),
               WithinRel(est.lower_bound, 1e-12));
  }
  SECTION("p = inf feeds the constant profile") {
    const auto est = norm_estimate(mat(2, 2, {1.0, 2.0, 3.0, 4.0}), inf, 1.0);
    CHECK_THAT(est.lower_bound, WithinRel(10.0, 1e-12));
    CHECK(est.method == NormMethod::ExactOnes);
  }
  SECTION("p = inf, q = inf is the largest row sum") {
    const auto est = norm_estimate(mat(2, 2, {1.0, 2.0, 3.0, 4.0}), inf, inf);
    CHECK_THAT(est.lower_bound, WithinRel(7.0, 1e-12));
  }
  SECTION("rank-1 doubling matrix at p = q = 2") {
    const auto est = norm_estimate(mat(2, 2, {1.0, 1.0, 1.0, 1.0}), 2.0, 2.0);
    CHECK_THAT(est.lower_bound, WithinRel(2.0, 1e-9));
    CHECK(est.method == NormMethod::SVD);
    CHECK(est.converged);
  }
}

TEST_CASE("diagonal matrices match the closed form") {
  const Matrix a = mat(3, 3, {3.0, 0, 0, 0, 1.0, 0, 0, 0, 2.0});
  const std::vector<double> d = {3.0, 1.0, 2.0};
  auto lr_norm = [&](double r) {
    double s = 0.0;
    for (double x : d) s += std::pow(x, r);
    return std::pow(s, 1.0 / r);
  };

  SECTION("q >= p concentrates on the largest entry") {
    for (auto [p, q] : std::vector<std::pair<double, double>>{
             {1.5, 2.0}, {2.0, 3.0}, {2.0, 2.0}, {1.0, 1.0}, {3.0, inf}}) {
      const auto est = norm_estimate(a, p, q);
      CHECK_THAT(est.lower_bound, WithinRel(3.0, 1e-8));
    }
  }
  SECTION("q < p spreads mass, giving the r-norm of the diagonal") {
    for (auto [p, q] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {4.0, 2.0}}) {
      const double r = p * q / (p - q);
      const auto est = norm_estimate(a, p, q);
      CHECK_THAT(est.lower_bound, WithinRel(lr_norm(r), 1e-8));
    }
  }
  SECTION("quasi-norm case stays one-sided") {
    const double truth = lr_norm(2.0 * 0.5 / (2.0 - 0.5));
    NormOptions opts;
    opts.restarts = 32;
    const auto est = norm_estimate(a, 2.0, 0.5, opts);
    CHECK(est.heuristic);
    CHECK(est.lower_bound <= truth * (1.0 + 1e-9));
    CHECK(est.lower_bound >= truth * (1.0 - 1e-3));
  }
}

TEST_CASE("rank-1 matrices factor into the two vector norms") {
  const std::vector<double> u = {1.0, 2.0};
  const std::vector<double> v = {3.0, 1.0, 1.0};
  Matrix a = Matrix::zeros(2, 3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) a.at(i, j) = u[i] * v[j];
  auto truth = [&](double p, double q) {
    const double pc = std::isinf(p) ? 1.0 : p / (p - 1.0);
    return vec_norm(u, q) * vec_norm(v, pc);
  };

  for (auto [p, q] : std::vector<std::pair<double, double>>{
           {2.0, 2.0}, {1.5, 3.0}, {4.0, 1.0}, {2.0, 1.5}}) {
    const auto est = norm_estimate(a, p, q);
    CHECK_THAT(est.lower_bound, WithinRel(truth(p, q), 1e-8));
  }
  SECTION("quasi-norm output stays below the closed form") {
    NormOptions opts;
    opts.restarts = 32;
    const auto est = norm_estimate(a, 2.0, 0.5, opts);
    const double t = truth(2.0, 0.5);
    CHECK(est.lower_bound <= t * (1.0 + 1e-9));
    CHECK(est.lower_bound >= t * (1.0 - 1e-3));
  }
}

TEST_CASE("estimates agree with the brute-force oracle on random matrices") {
  const double ps[] = {1.0, 1.5, 2.0, 4.0, inf};
  const double qs[] = {0.5, 1.0, 2.0, 3.0, inf};
  std::mt19937_64 rng(0x5EED);
  std::uniform_int_distribution<std::size_t> rows(1, 4), cols(1, 3);

  for (int k = 0; k < 200; ++k) {
    const double p = ps[k % 5];
    const double q = qs[(k / 5) % 5];
    const Matrix a = random_matrix(rng, rows(rng), cols(rng));
    const double bf = brute_force_norm(a, p, q);

    NormOptions opts;
    if (q < 1.0) opts.restarts = 32;
    const auto est = norm_estimate(a, p, q, opts);

    INFO("case " << k << ": p = " << p << ", q = " << q << ", " << a.rows << "x"
                 << a.cols << ", brute force " << bf);
    if (q >= 1.0) {
      CHECK(est.lower_bound >= bf - 1e-4);
      CHECK(est.lower_bound <= bf + 1e-4);
    } else {
      CHECK(est.lower_bound >= bf - 1e-3);
      CHECK(est.lower_bound <= bf + 1e-4);
    }
    // the stored extremal must reproduce the reported bound
    const double r = recomputed(a, est, p, q);
    if (est.lower_bound == 0.0)
      CHECK(r == 0.0);
    else
      CHECK_THAT(r, WithinRel(est.lower_bound, 1e-12));
  }
}

TEST_CASE("explicit oracle instance from the interior of the exponent range") {
  const Matrix a = mat(2, 2, {1.0, 0.5, 0.2, 1.0});
  const double bf = brute_force_norm(a, 3.0, 1.5);
  const auto est = norm_estimate(a, 3.0, 1.5);
  CHECK_THAT(est.lower_bound, WithinAbs(bf, 1e-4));
}

TEST_CASE("enlarging an entry never decreases the estimate") {
  std::mt19937_64 rng(0xFEED);
  std::uniform_int_distribution<std::size_t> pos(0, 8);
  for (auto [p, q] : std::vector<std::pair<double, double>>{
           {2.0, 3.0}, {4.0, 2.0}, {2.0, 2.0}, {1.5, 1.0}, {1.0, 2.0}, {2.0, inf}}) {
    for (int k = 0; k < 20; ++k) {
      Matrix a = random_matrix(rng, 3, 3);
      const double before = norm_estimate(a, p, q).lower_bound;
      a.a[pos(rng)] += 0.5;
      const double after = norm_estimate(a, p, q).lower_bound;
      CHECK(after >= before * (1.0 - 1e-9));
    }
  }
  SECTION("heuristic branch with slack") {
    for (int k = 0; k < 10; ++k) {
      Matrix a = random_matrix(rng, 3, 3);
      NormOptions opts;
      opts.restarts = 32;
      const double before = norm_estimate(a, 2.0, 0.5, opts).lower_bound;
      a.a[pos(rng)] += 0.5;
      const double after = norm_estimate(a, 2.0, 0.5, opts).lower_bound;
      CHECK(after >= before * (1.0 - 2e-3));
    }
  }
}

TEST_CASE("estimates scale linearly with the matrix") {
  std::mt19937_64 rng(0xACE);
  const Matrix a = random_matrix(rng, 3, 4);
  Matrix b = a;
  for (auto& x : b.a) x *= 3.7;
  for (auto [p, q] : std::vector<std::pair<double, double>>{{1.5, 3.0},
                                                            {4.0, 2.0},
                                                            {2.0, 2.0},
                                                            {1.0, 2.0},
                                                            {2.0, inf},
                                                            {inf, 2.0},
                                                            {2.0, 0.5}}) {
    const double na = norm_estimate(a, p, q).lower_bound;
    const double nb = norm_estimate(b, p, q).lower_bound;
    CHECK_THAT(nb, WithinRel(3.7 * na, 1e-9));
  }
}

TEST_CASE("iterative path forced towards p = 1 recovers the column formula") {
  std::mt19937_64 rng(0xBEEF);
  for (int k = 0; k < 10; ++k) {
    const Matrix a = random_matrix(rng, 4, 3);
    const double exact = norm_estimate(a, 1.0, 2.0).lower_bound;
    const auto iter = norm_estimate(a, 1.0 + 1e-10, 2.0);
    CHECK(iter.method == NormMethod::NonlinearPower);
    if (exact == 0.0)
      CHECK(iter.lower_bound == 0.0);
    else
      CHECK_THAT(iter.lower_bound, WithinRel(exact, 1e-9));
  }
}

TEST_CASE("options are reflected in the report") {
  const Matrix a = mat(2, 2, {1.0, 0.5, 0.5, 1.0});
  NormOptions opts;
  opts.restarts = 3;
  opts.seed = 42;
  const auto est = norm_estimate(a, 1.5, 2.5, opts);
  CHECK(est.restarts == 3);
  CHECK(est.seed == 42);
  CHECK(est.method == NormMethod::NonlinearPower);
  CHECK_FALSE(est.heuristic);

  const auto quasi = norm_estimate(a, 2.0, 0.5, opts);
  CHECK(quasi.heuristic);
  CHECK_FALSE(quasi.converged);
}

TEST_CASE("discretized transform with p = 1 reproduces the exact norm") {
  // exponential kernel over the band [1, 2): the norm is attained at the left
  // edge and equals 1/sqrt(2)
  const auto e = derive(1.0, 1.0, 2.0);
  const auto g = log_grid(1e-6, 1e4, 64);
  const auto op = discretize(e, OperatorKind::Laplace, Weight::indicator(1.0, 2.0),
                             Weight::one(), g, g);
  const auto est = norm_pq(op);
  CHECK(est.method == NormMethod::ExactColumn);
  CHECK_THAT(est.lower_bound, WithinRel(std::sqrt(0.5), 1e-3));
}

TEST_CASE("bound reports") {
  const auto g = log_grid(1e-6, 1e6, 32);
  NormOptions opts;
  opts.restarts = 2;

  SECTION("bracketed branch with explicit constants") {
    const auto e = derive(1.0, 2.0, 2.0);
    const auto cs = build_criteria(e, OperatorKind::Laplace, Weight::one(), Weight::one());
    const auto op = discretize(e, OperatorKind::Laplace, Weight::one(), Weight::one(), g, g);
    const auto est = norm_pq(op, opts);
    // classical value sqrt(pi), reachable up to domain truncation
    CHECK(est.lower_bound > 1.55);
    CHECK(est.lower_bound < std::sqrt(M_PI) * 1.001);

    const auto rep = bound_check(est, cs);
    CHECK(rep.bracketed);
    REQUIRE(rep.alpha);
    REQUIRE(rep.beta);
    CHECK_THAT(*rep.alpha, WithinRel(std::sqrt(0.5), 1e-12));
    CHECK_THAT(*rep.beta, WithinRel(2.0, 1e-12));
    CHECK_THAT(rep.lower_value, WithinRel(1.0, 1e-6));
    CHECK(rep.lower_ok);
    CHECK(rep.upper_ok);
    REQUIRE(rep.ratio);
    CHECK(*rep.ratio > 1.5);
    CHECK(*rep.ratio < 1.8);
  }

  SECTION("one-sided branch keeps only the lower constant") {
    const auto e = derive(1.0, 2.0, 2.0);
    const auto cs = build_criteria(e, OperatorKind::Stieltjes, Weight::one(), Weight::one());
    const auto op = discretize(e, OperatorKind::Stieltjes, Weight::one(), Weight::one(), g, g);
    const auto est = norm_pq(op, opts);
    // classical value pi
    CHECK(est.lower_bound > 2.9);
    CHECK(est.lower_bound < M_PI * 1.001);

    const auto rep = bound_check(est, cs);
    CHECK(rep.bracketed);
    REQUIRE(rep.alpha);
    CHECK_THAT(*rep.alpha, WithinRel(1.0, 1e-12));
    CHECK_FALSE(rep.beta);
    CHECK(rep.lower_ok);
    CHECK(rep.upper_ok);
    REQUIRE(rep.ratio);
    CHECK(*rep.ratio > 2.8);
  }

  SECTION("branch without constants reports the ratio only") {
    const auto e = derive(1.0, 2.0, 2.0);
    const auto cs = build_criteria(e, OperatorKind::Hardy, Weight::one(), Weight::one());
    const auto op = discretize(e, OperatorKind::Hardy, Weight::one(), Weight::one(), g, g);
    const auto est = norm_pq(op, opts);
    // classical value 2
    CHECK(est.lower_bound > 1.8);
    CHECK(est.lower_bound < 2.0 * 1.001);

    const auto rep = bound_check(est, cs);
    CHECK_FALSE(rep.bracketed);
    CHECK_FALSE(rep.alpha);
    CHECK_FALSE(rep.beta);
    REQUIRE(rep.ratio);
    CHECK(*rep.ratio > 1.75);
    CHECK(*rep.ratio < 2.02);
  }

  SECTION("zero operator short-circuits") {
    const auto e = derive(1.0, 2.0, 2.0);
    const auto cs = build_criteria(e, OperatorKind::Laplace, Weight::zero(), Weight::one());
    NormEstimate est;
    const auto rep = bound_check(est, cs);
    CHECK(rep.note == "zero operator");
    CHECK(rep.lower_ok);
    CHECK(rep.upper_ok);
  }
}
