#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scoutnd/benchmarks.hpp"
#include "scoutnd/sampling.hpp"

using namespace scoutnd;

TEST_CASE("sphere case 1: optimum sits on the constraint") {
  ProblemSpec p = make_sphere({.dim = 2, .constraint = SphereConstraint::kBoundary});
  EvalResult at_opt = evaluate(p, 2, {0.5, 0.5}, {0.5});  // u = 0.5 -> b = 0
  CHECK(at_opt.f == 0.5);
  CHECK(at_opt.c == Vec{0.0});
  CHECK(*p.known_optimum == 0.5);

  // The unconstrained minimizer x = 0 violates the constraint.
  EvalResult at_zero = evaluate(p, 2, {0.0, 0.0}, {0.5});
  CHECK(at_zero.c[0] == 1.0);
  CHECK(at_zero.c[0] > 0.0);
}

TEST_CASE("sphere case 2: origin is strictly feasible") {
  for (int d : {2, 8}) {
    ProblemSpec p = make_sphere({.dim = d, .constraint = SphereConstraint::kInterior});
    EvalResult r = evaluate(p, 2, Vec(d, 0.0), {0.5});
    CHECK(r.f == 0.0);
    CHECK(r.c == Vec{-1.0});
    CHECK(*p.known_optimum == 0.0);
  }
}

TEST_CASE("high-fidelity sphere at the unit point") {
  ProblemSpec p = make_sphere({.dim = 2});
  CHECK(evaluate(p, 2, {1.0, 1.0}, {0.5}).f == 2.0);
}

TEST_CASE("low-fidelity level downscales the design point") {
  ProblemSpec p = make_sphere({.dim = 2});
  EvalResult lf = evaluate(p, 1, {1.05, 0.0}, {0.5});
  CHECK(lf.f == 1.0);
  EvalResult hf = evaluate(p, 2, {1.05, 1.05}, {0.5});
  EvalResult lf2 = evaluate(p, 1, {1.05, 1.05}, {0.5});
  CHECK(lf2.f == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(hf.f == doctest::Approx(2.0 * 1.05 * 1.05).epsilon(1e-15));
}

TEST_CASE("HF and LF agree to the algebraic relative bound at b = 0") {
  const double bound = 1.0 - 1.0 / (1.05 * 1.05);
  ProblemSpec p = make_sphere({.dim = 3});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    Vec x = {unif(rng), unif(rng), unif(rng)};
    double hf = evaluate(p, 2, x, {0.5}).f;
    double lf = evaluate(p, 1, x, {0.5}).f;
    if (hf == 0.0) continue;
    CHECK(std::abs(hf - lf) / hf <= bound + 1e-12);
  }
}

TEST_CASE("noise transform: median is 0, spread matches noise_std") {
  SphereCase c{.dim = 2};
  ProblemSpec p = make_sphere(c);
  // b at the CDF midpoint is exactly zero.
  CHECK(p.noise_sampler({0.5})[0] == 0.0);
  // default reading of N(0, 0.1): variance 0.1, std = sqrt(0.1)
  CHECK(c.noise_std == doctest::Approx(std::sqrt(0.1)).epsilon(1e-15));

  auto rows = draw_pseudo(1, 20000, 17);
  std::vector<double> bs;
  for (const Vec& u : rows) bs.push_back(p.noise_sampler(u)[0]);
  CHECK(oracles::mean(bs) == doctest::Approx(0.0).epsilon(1e-2));
  CHECK(std::sqrt(oracles::sample_variance(bs)) ==
        doctest::Approx(std::sqrt(0.1)).epsilon(0.03));
}

TEST_CASE("noiseless reporting evaluator ignores b") {
  ProblemSpec p = make_sphere({.dim = 2});
  EvalResult r = p.true_eval({1.0, 2.0});
  CHECK(r.f == 5.0);
  CHECK(r.c == Vec{1.0 - 3.0});
}

TEST_CASE("sphere construction guards") {
  CHECK_THROWS_AS(make_sphere({.dim = 1, .constraint = SphereConstraint::kBoundary}),
                  ValueError);
  CHECK_NOTHROW(make_sphere({.dim = 1, .constraint = SphereConstraint::kInterior}));
  SphereCase bad{.dim = 2};
  bad.noise_std = -0.1;
  CHECK_THROWS_AS(make_sphere(bad), ValueError);
  SphereCase bad_scale{.dim = 2};
  bad_scale.lf_scale = 0.0;
  CHECK_THROWS_AS(make_sphere(bad_scale), ValueError);
  SphereCase bad_weight{.dim = 2};
  bad_weight.lf_cost_weight = 1.5;
  CHECK_THROWS_AS(make_sphere(bad_weight), ValueError);
}
