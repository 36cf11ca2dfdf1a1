#pragma once

#include <cmath>

#include "scoutnd/objective.hpp"

namespace scoutnd {

enum class SphereConstraint {
  kBoundary,  // case 1: C(x) = 1 - (x_1 + x_2), optimum on the constraint
  kInterior,  // case 2: C(x) = sum_i x_i - 1, optimum strictly feasible
};

// Noisy sphere benchmark: f(x, b) = sum_i x_i^2 + b, b ~ N(0, noise_std^2).
// The low-fidelity level evaluates the same objective at x / lf_scale.
struct SphereCase {
  int dim = 2;
  SphereConstraint constraint = SphereConstraint::kBoundary;
  // The source problem writes b ~ N(0, 0.1); we read the 0.1 as a variance,
  // so the default standard deviation is sqrt(0.1). Configurable for the
  // other reading.
  double noise_std = std::sqrt(0.1);
  double lf_scale = 1.05;
  double lf_cost_weight = 0.1;
};

ProblemSpec make_sphere(const SphereCase& sphere);

}  // namespace scoutnd
