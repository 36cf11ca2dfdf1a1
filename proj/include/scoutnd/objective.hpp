#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "scoutnd/common.hpp"

namespace scoutnd {

struct EvalResult {
  double f = 0.0;
  Vec c;
};

// One fidelity level: (x, b) -> (f, C). The slot identifies the calling
// worker so evaluators backed by external processes can keep one child per
// worker; in-process evaluators ignore it.
using LevelEvaluator =
    std::function<EvalResult(const Vec& x, const Vec& b, int slot)>;

// Deterministic map from a unit-hypercube point to a noise draw b ~ p(b).
using NoiseSampler = std::function<Vec(const Vec& u)>;

// Noiseless reporting objective at a design point, when the problem exposes
// one (benchmark mode). Used for traces and accuracy measurement, never by
// the optimizer itself.
using TrueEvaluator = std::function<EvalResult(const Vec& x)>;

// Per-level call counters, shared across copies of a ProblemSpec.
class EvalCounter {
 public:
  explicit EvalCounter(int levels) : calls_(levels) {}
  void increment(int level_index) { calls_[level_index].fetch_add(1, std::memory_order_relaxed); }
  std::uint64_t calls(int level_index) const { return calls_[level_index].load(); }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& c : calls_) t += c.load();
    return t;
  }
  int levels() const { return static_cast<int>(calls_.size()); }

 private:
  std::vector<std::atomic<std::uint64_t>> calls_;
};

struct ProblemSpec {
  int dim = 0;
  std::vector<LevelEvaluator> levels;  // ascending fidelity and cost
  int constraint_count = 0;            // I, identical across levels
  int noise_dim = 0;
  NoiseSampler noise_sampler;
  Vec costs;  // per-level relative cost weights, strictly increasing
  std::optional<double> known_optimum;
  TrueEvaluator true_eval;  // optional
  std::shared_ptr<EvalCounter> counter;

  int num_levels() const { return static_cast<int>(levels.size()); }
  double hf_cost_weight(int level) const { return costs[level - 1] / costs.back(); }
  void validate() const;
  std::shared_ptr<EvalCounter> ensure_counter();
};

// L = f + sum_i lambda_i * max(C_i, 0). NaN anywhere is an error; silently
// propagating NaN into a gradient estimate is worse than failing the run.
double augmented_objective(double f_val, const Vec& c_vals, const Vec& lambda);

// Evaluate one fidelity level at x with noise drawn from the unit-hypercube
// point u_noise. Pure given (level, x, u_noise); counts the call.
EvalResult evaluate(const ProblemSpec& problem, int level, const Vec& x,
                    const Vec& u_noise, int slot = 0);

struct PenaltySchedule {
  std::vector<Vec> lambdas;  // componentwise nondecreasing

  int rounds() const { return static_cast<int>(lambdas.size()); }
  bool empty() const { return lambdas.empty(); }
  void validate() const;
};

// SUMT schedule lambda_k = lambda0 * ratio^k, k = 0..count-1.
PenaltySchedule geometric_schedule(const Vec& lambda0, double ratio, int count);

}  // namespace scoutnd
