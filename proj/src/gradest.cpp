#include "scoutnd/gradest.hpp"

#include <cmath>

#include "scoutnd/parallel.hpp"

namespace scoutnd {

namespace {

struct SampleTerm {
  Vec x;
  ThetaGrad sc;
  double value = 0.0;       // L at the estimator's level (or level difference)
  EvalResult report;        // what goes into the trace
  EvalResult report_low;    // trace entry for the coupled low level (MF only)
  bool has_low = false;
};

EvalResult reporting_value(const ProblemSpec& problem, const Vec& x,
                           const EvalResult& sampled) {
  return problem.true_eval ? problem.true_eval(x) : sampled;
}

void check_batch(const ProblemSpec& problem, const SampleBatch& batch, int min_s) {
  if (batch.size() < min_s) {
    throw ValueError("estimator: batch of " + std::to_string(batch.size()) +
                     " samples, need at least " + std::to_string(min_s));
  }
  if (static_cast<int>(batch.u_design.front().size()) != problem.dim) {
    throw DimensionError("estimator: batch design dimension mismatch");
  }
  if (problem.noise_dim > 0 &&
      static_cast<int>(batch.u_noise.front().size()) != problem.noise_dim) {
    throw DimensionError("estimator: batch noise dimension mismatch");
  }
}

// Evaluates one level over the batch, optionally coupled with level-1 at the
// same (x_i, b_i). Results are indexed by sample so reduction order is fixed.
std::vector<SampleTerm> evaluate_level(const GaussianPolicy& policy,
                                       const ProblemSpec& problem, int level,
                                       bool couple_previous, const Vec& lambda,
                                       const SampleBatch& batch,
                                       const EvalContext& ctx) {
  const int s_count = batch.size();
  std::vector<SampleTerm> terms(s_count);
  parallel_for(s_count, ctx.workers, [&](int i, int slot) {
    SampleTerm& t = terms[i];
    t.x = sample(policy, batch.u_design[i]);
    t.sc = score(policy, t.x);
    EvalResult hi;
    try {
      hi = evaluate(problem, level, t.x, batch.u_noise[i], slot);
    } catch (const Error& e) {
      throw EvalError(level, t.x,
                      std::string(e.what()) + " (sample " + std::to_string(i) + ")");
    }
    t.value = augmented_objective(hi.f, hi.c, lambda);
    t.report = reporting_value(problem, t.x, hi);
    if (couple_previous) {
      EvalResult lo;
      try {
        lo = evaluate(problem, level - 1, t.x, batch.u_noise[i], slot);
      } catch (const Error& e) {
        throw EvalError(level - 1, t.x, std::string(e.what()) + " (sample " +
                                            std::to_string(i) + ")");
      }
      t.value -= augmented_objective(lo.f, lo.c, lambda);
      t.report_low = reporting_value(problem, t.x, lo);
      t.has_low = true;
    }
  });
  return terms;
}

void record_level(const std::vector<SampleTerm>& terms, int level,
                  double charge_weight, const EvalContext& ctx) {
  if (!ctx.trace) return;
  for (const SampleTerm& t : terms) {
    if (t.has_low) ctx.trace->append(level - 1, 0.0, t.report_low.f, t.report_low.c);
    ctx.trace->append(level, charge_weight, t.report.f, t.report.c);
  }
}

// Accumulates the level mean of weight_i * score_i into the estimate, along
// with the variance of the per-sample terms divided by S.
void accumulate(GradEstimate& est, const std::vector<SampleTerm>& terms,
                const Vec& weights) {
  const int s_count = static_cast<int>(terms.size());
  const int d = terms.front().sc.dim();
  Vec mean(2 * d, 0.0);
  for (int i = 0; i < s_count; ++i) {
    for (int j = 0; j < d; ++j) {
      mean[j] += weights[i] * terms[i].sc.d_mu[j];
      mean[d + j] += weights[i] * terms[i].sc.d_log_sigma[j];
    }
  }
  for (double& v : mean) v /= s_count;

  Vec var(2 * d, 0.0);
  if (s_count >= 2) {
    for (int i = 0; i < s_count; ++i) {
      for (int j = 0; j < d; ++j) {
        double tmu = weights[i] * terms[i].sc.d_mu[j] - mean[j];
        double tls = weights[i] * terms[i].sc.d_log_sigma[j] - mean[d + j];
        var[j] += tmu * tmu;
        var[d + j] += tls * tls;
      }
    }
    for (double& v : var) v /= (s_count - 1);
  }

  for (int j = 0; j < d; ++j) {
    est.grad.d_mu[j] += mean[j];
    est.grad.d_log_sigma[j] += mean[d + j];
    est.per_component_variance[j] += var[j] / s_count;
    est.per_component_variance[d + j] += var[d + j] / s_count;
  }
}

GradEstimate make_empty_estimate(const ProblemSpec& problem, int d) {
  GradEstimate est;
  est.grad = ThetaGrad{Vec(d, 0.0), Vec(d, 0.0)};
  est.per_component_variance.assign(2 * d, 0.0);
  est.evals_by_level.assign(problem.num_levels(), 0);
  return est;
}

}  // namespace

GradEstimate sf_plain(const GaussianPolicy& policy, const ProblemSpec& problem,
                      int level, const Vec& lambda, const SampleBatch& batch,
                      const EvalContext& ctx) {
  policy.validate();
  check_batch(problem, batch, 1);
  auto terms = evaluate_level(policy, problem, level, false, lambda, batch, ctx);
  record_level(terms, level, problem.hf_cost_weight(level), ctx);

  GradEstimate est = make_empty_estimate(problem, policy.dim());
  Vec weights(terms.size());
  double mean_l = 0.0;
  for (size_t i = 0; i < terms.size(); ++i) {
    weights[i] = terms[i].value;
    mean_l += terms[i].value;
  }
  accumulate(est, terms, weights);
  est.batch_mean_L = mean_l / static_cast<double>(terms.size());
  est.evals_by_level[level - 1] = terms.size();
  est.charged_hf_cost = problem.hf_cost_weight(level) * static_cast<double>(terms.size());
  return est;
}

GradEstimate sf_baseline(const GaussianPolicy& policy, const ProblemSpec& problem,
                         int level, const Vec& lambda, const SampleBatch& batch,
                         const EvalContext& ctx) {
  policy.validate();
  check_batch(problem, batch, 2);
  auto terms = evaluate_level(policy, problem, level, false, lambda, batch, ctx);
  record_level(terms, level, problem.hf_cost_weight(level), ctx);

  GradEstimate est = make_empty_estimate(problem, policy.dim());
  const int s_count = static_cast<int>(terms.size());
  double sum_l = 0.0;
  for (const SampleTerm& t : terms) sum_l += t.value;
  Vec weights(s_count);
  for (int i = 0; i < s_count; ++i) {
    weights[i] = terms[i].value - (sum_l - terms[i].value) / (s_count - 1);
  }
  accumulate(est, terms, weights);
  est.batch_mean_L = sum_l / s_count;
  est.evals_by_level[level - 1] = s_count;
  est.charged_hf_cost = problem.hf_cost_weight(level) * s_count;
  return est;
}

GradEstimate sf_multifidelity(const GaussianPolicy& policy,
                              const ProblemSpec& problem, const Vec& lambda,
                              const std::vector<SampleBatch>& batches,
                              const EvalContext& ctx) {
  policy.validate();
  const int n_levels = problem.num_levels();
  if (static_cast<int>(batches.size()) != n_levels) {
    throw DimensionError("sf_multifidelity: need one batch per fidelity level");
  }
  GradEstimate est = make_empty_estimate(problem, policy.dim());
  for (int level = 1; level <= n_levels; ++level) {
    const SampleBatch& batch = batches[level - 1];
    check_batch(problem, batch, 2);
    bool coupled = level >= 2;
    auto terms = evaluate_level(policy, problem, level, coupled, lambda, batch, ctx);
    record_level(terms, level, problem.hf_cost_weight(level), ctx);

    const int s_count = static_cast<int>(terms.size());
    double sum_d = 0.0;
    for (const SampleTerm& t : terms) sum_d += t.value;
    Vec weights(s_count);
    for (int i = 0; i < s_count; ++i) {
      weights[i] = terms[i].value - (sum_d - terms[i].value) / (s_count - 1);
    }
    accumulate(est, terms, weights);
    est.batch_mean_L += sum_d / s_count;
    est.evals_by_level[level - 1] += s_count;
    if (coupled) est.evals_by_level[level - 2] += s_count;
    est.charged_hf_cost += problem.hf_cost_weight(level) * s_count;
  }
  return est;
}

VarianceReport variance_report(const std::vector<GradEstimate>& repetitions) {
  if (repetitions.size() < 2) {
    throw ValueError("variance_report: need at least 2 repetitions");
  }
  const int d = repetitions.front().grad.dim();
  const int n = static_cast<int>(repetitions.size());
  Vec mean(2 * d, 0.0);
  for (const GradEstimate& e : repetitions) {
    for (int j = 0; j < d; ++j) {
      mean[j] += e.grad.d_mu[j];
      mean[d + j] += e.grad.d_log_sigma[j];
    }
  }
  for (double& v : mean) v /= n;

  VarianceReport report;
  report.per_component.assign(2 * d, 0.0);
  for (const GradEstimate& e : repetitions) {
    for (int j = 0; j < d; ++j) {
      double dmu = e.grad.d_mu[j] - mean[j];
      double dls = e.grad.d_log_sigma[j] - mean[d + j];
      report.per_component[j] += dmu * dmu;
      report.per_component[d + j] += dls * dls;
    }
  }
  for (double& v : report.per_component) v /= (n - 1);
  for (double v : report.per_component) {
    report.max_component = std::max(report.max_component, v);
    report.trace_total += v;
  }
  report.mean_component = report.trace_total / (2.0 * d);
  return report;
}

}  // namespace scoutnd
