#include "scoutnd/benchmarks.hpp"

#include <algorithm>

#include "scoutnd/math.hpp"

namespace scoutnd {

namespace {

// Left-to-right accumulation; the reference simulator fixture mirrors this
// order so protocol round trips are bit-exact.
double sphere_value(const Vec& x, double scale, double b) {
  double acc = 0.0;
  for (double xi : x) {
    double y = xi / scale;
    acc += y * y;
  }
  return acc + b;
}

Vec sphere_constraints(const Vec& x, SphereConstraint which) {
  if (which == SphereConstraint::kBoundary) {
    return {1.0 - (x[0] + x[1])};
  }
  double s = 0.0;
  for (double xi : x) s += xi;
  return {s - 1.0};
}

}  // namespace

ProblemSpec make_sphere(const SphereCase& sphere) {
  if (sphere.dim < 1) throw ValueError("sphere: dim must be >= 1");
  if (sphere.constraint == SphereConstraint::kBoundary && sphere.dim < 2) {
    throw ValueError("sphere: the boundary constraint references x_1 + x_2, need dim >= 2");
  }
  if (sphere.noise_std < 0.0) throw ValueError("sphere: noise_std must be >= 0");
  if (!(sphere.lf_scale > 0.0)) throw ValueError("sphere: lf_scale must be positive");
  if (!(sphere.lf_cost_weight > 0.0 && sphere.lf_cost_weight < 1.0)) {
    throw ValueError("sphere: lf_cost_weight must lie in (0, 1)");
  }

  const double noise_std = sphere.noise_std;
  const double lf_scale = sphere.lf_scale;
  const SphereConstraint which = sphere.constraint;

  ProblemSpec problem;
  problem.dim = sphere.dim;
  problem.constraint_count = 1;
  problem.noise_dim = 1;
  problem.noise_sampler = [noise_std](const Vec& u) -> Vec {
    double uc = std::clamp(u[0], 1e-12, 1.0 - 1e-12);
    return {noise_std == 0.0 ? 0.0 : noise_std * inverse_normal_cdf(uc)};
  };
  problem.levels.push_back([which, lf_scale](const Vec& x, const Vec& b, int) {
    return EvalResult{sphere_value(x, lf_scale, b[0]), sphere_constraints(x, which)};
  });
  problem.levels.push_back([which](const Vec& x, const Vec& b, int) {
    return EvalResult{sphere_value(x, 1.0, b[0]), sphere_constraints(x, which)};
  });
  problem.costs = {sphere.lf_cost_weight, 1.0};
  problem.known_optimum = which == SphereConstraint::kBoundary ? 0.5 : 0.0;
  problem.true_eval = [which](const Vec& x) {
    return EvalResult{sphere_value(x, 1.0, 0.0), sphere_constraints(x, which)};
  };
  problem.ensure_counter();
  problem.validate();
  return problem;
}

}  // namespace scoutnd
