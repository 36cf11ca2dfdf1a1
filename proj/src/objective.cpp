#include "scoutnd/objective.hpp"

#include <cmath>

namespace scoutnd {

void ProblemSpec::validate() const {
  if (dim < 1) throw ValueError("problem: dim must be >= 1");
  if (levels.empty()) throw ValueError("problem: need at least one fidelity level");
  if (constraint_count < 0) throw ValueError("problem: negative constraint count");
  if (noise_dim < 0) throw ValueError("problem: negative noise dimension");
  if (noise_dim > 0 && !noise_sampler) {
    throw ValueError("problem: noise_dim > 0 requires a noise_sampler");
  }
  if (costs.size() != levels.size()) {
    throw DimensionError("problem: costs must have one entry per level");
  }
  for (size_t l = 0; l < costs.size(); ++l) {
    if (!(costs[l] > 0.0)) throw ValueError("problem: costs must be positive");
    if (l > 0 && !(costs[l] > costs[l - 1])) {
      throw ValueError("problem: costs must be strictly increasing with level");
    }
  }
}

std::shared_ptr<EvalCounter> ProblemSpec::ensure_counter() {
  if (!counter) counter = std::make_shared<EvalCounter>(num_levels());
  return counter;
}

double augmented_objective(double f_val, const Vec& c_vals, const Vec& lambda) {
  if (c_vals.size() != lambda.size()) {
    throw DimensionError("augmented_objective: constraint/penalty length mismatch");
  }
  if (std::isnan(f_val)) throw ValueError("augmented_objective: NaN objective value");
  double total = f_val;
  for (size_t i = 0; i < c_vals.size(); ++i) {
    if (std::isnan(c_vals[i]) || std::isnan(lambda[i])) {
      throw ValueError("augmented_objective: NaN in constraint " + std::to_string(i));
    }
    // Zero disables a constraint (the unpenalized-run path); negatives would
    // reward violations.
    if (!(lambda[i] >= 0.0)) {
      throw ValueError("augmented_objective: penalty " + std::to_string(i) +
                       " must be nonnegative");
    }
    total += lambda[i] * std::max(c_vals[i], 0.0);
  }
  return total;
}

EvalResult evaluate(const ProblemSpec& problem, int level, const Vec& x,
                    const Vec& u_noise, int slot) {
  if (level < 1 || level > problem.num_levels()) {
    throw ValueError("evaluate: level " + std::to_string(level) + " out of range 1.." +
                     std::to_string(problem.num_levels()));
  }
  if (static_cast<int>(x.size()) != problem.dim) {
    throw DimensionError("evaluate: design vector has wrong dimension");
  }
  Vec b;
  if (problem.noise_dim > 0) {
    if (static_cast<int>(u_noise.size()) != problem.noise_dim) {
      throw DimensionError("evaluate: noise point has wrong dimension");
    }
    b = problem.noise_sampler(u_noise);
  }
  EvalResult r;
  try {
    r = problem.levels[level - 1](x, b, slot);
  } catch (const EvalError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvalError(level, x, std::string("evaluator failed at level ") +
                                  std::to_string(level) + ": " + e.what());
  }
  if (static_cast<int>(r.c.size()) != problem.constraint_count) {
    throw EvalError(level, x,
                    "evaluator returned " + std::to_string(r.c.size()) +
                        " constraints, expected " +
                        std::to_string(problem.constraint_count));
  }
  if (std::isnan(r.f)) throw EvalError(level, x, "evaluator returned NaN objective");
  for (double ci : r.c) {
    if (std::isnan(ci)) throw EvalError(level, x, "evaluator returned NaN constraint");
  }
  if (problem.counter) problem.counter->increment(level - 1);
  return r;
}

void PenaltySchedule::validate() const {
  for (size_t k = 0; k < lambdas.size(); ++k) {
    for (double v : lambdas[k]) {
      if (!(v > 0.0)) throw ValueError("penalty schedule: entries must be positive");
    }
    if (k > 0) {
      if (lambdas[k].size() != lambdas[k - 1].size()) {
        throw DimensionError("penalty schedule: inconsistent lambda lengths");
      }
      for (size_t i = 0; i < lambdas[k].size(); ++i) {
        if (lambdas[k][i] < lambdas[k - 1][i]) {
          throw ValueError("penalty schedule: lambdas must be nondecreasing");
        }
      }
    }
  }
}

PenaltySchedule geometric_schedule(const Vec& lambda0, double ratio, int count) {
  if (count < 1) throw ValueError("geometric_schedule: count must be >= 1");
  if (!(ratio > 1.0)) throw ValueError("geometric_schedule: ratio must exceed 1");
  for (double v : lambda0) {
    if (!(v > 0.0)) throw ValueError("geometric_schedule: lambda0 must be positive");
  }
  PenaltySchedule schedule;
  schedule.lambdas.reserve(count);
  Vec current = lambda0;
  for (int k = 0; k < count; ++k) {
    schedule.lambdas.push_back(current);
    for (double& v : current) v *= ratio;
  }
  schedule.validate();
  return schedule;
}

}  // namespace scoutnd
