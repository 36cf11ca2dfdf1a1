#pragma once

#include "scoutnd/common.hpp"

namespace scoutnd {

// Factorized Gaussian search distribution q(x | theta) over the design
// variables, theta = (mu, log sigma) per dimension. Scale is kept in log
// space so a gradient step can never produce a non-positive sigma.
struct GaussianPolicy {
  Vec mu;
  Vec log_sigma;

  int dim() const { return static_cast<int>(mu.size()); }
  Vec sigma() const;
  void validate() const;
};

GaussianPolicy make_policy(const Vec& mu, double sigma0);

// Gradient of a scalar w.r.t. theta, split into the mu block and the
// log-sigma block.
struct ThetaGrad {
  Vec d_mu;
  Vec d_log_sigma;

  int dim() const { return static_cast<int>(d_mu.size()); }
};

// Deterministic inverse-CDF transform of a unit-hypercube point, so MC and
// QMC share one sampling path. u is clamped to [1e-12, 1 - 1e-12].
Vec sample(const GaussianPolicy& policy, const Vec& u);

// Closed-form score: d/d_mu_j log q = (x_j - mu_j) / sigma_j^2,
// d/d_logsigma_j log q = ((x_j - mu_j)^2 / sigma_j^2) - 1.
ThetaGrad score(const GaussianPolicy& policy, const Vec& x);

double log_density(const GaussianPolicy& policy, const Vec& x);

}  // namespace scoutnd
