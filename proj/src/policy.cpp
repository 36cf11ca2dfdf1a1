#include "scoutnd/policy.hpp"

#include <algorithm>
#include <cmath>

#include "scoutnd/math.hpp"

namespace scoutnd {

namespace {
constexpr double kUnitClamp = 1e-12;

void check_dim(const GaussianPolicy& policy, const Vec& v, const char* what) {
  if (v.size() != policy.mu.size()) {
    throw DimensionError(std::string(what) + " has length " +
                         std::to_string(v.size()) + ", policy dimension is " +
                         std::to_string(policy.mu.size()));
  }
}
}  // namespace

Vec GaussianPolicy::sigma() const {
  Vec s(log_sigma.size());
  for (size_t j = 0; j < log_sigma.size(); ++j) s[j] = std::exp(log_sigma[j]);
  return s;
}

void GaussianPolicy::validate() const {
  if (mu.empty() || mu.size() != log_sigma.size()) {
    throw DimensionError("policy: mu and log_sigma must be nonempty and equal-length");
  }
  for (size_t j = 0; j < mu.size(); ++j) {
    if (!std::isfinite(mu[j]) || !std::isfinite(log_sigma[j])) {
      throw ValueError("policy: non-finite parameter at dimension " + std::to_string(j));
    }
  }
}

GaussianPolicy make_policy(const Vec& mu, double sigma0) {
  if (!(sigma0 > 0.0)) throw ValueError("make_policy: sigma0 must be positive");
  GaussianPolicy p{mu, Vec(mu.size(), std::log(sigma0))};
  p.validate();
  return p;
}

Vec sample(const GaussianPolicy& policy, const Vec& u) {
  check_dim(policy, u, "unit-hypercube point");
  Vec x(u.size());
  for (size_t j = 0; j < u.size(); ++j) {
    double uj = std::clamp(u[j], kUnitClamp, 1.0 - kUnitClamp);
    x[j] = policy.mu[j] + std::exp(policy.log_sigma[j]) * inverse_normal_cdf(uj);
  }
  return x;
}

ThetaGrad score(const GaussianPolicy& policy, const Vec& x) {
  check_dim(policy, x, "design vector");
  ThetaGrad g{Vec(x.size()), Vec(x.size())};
  for (size_t j = 0; j < x.size(); ++j) {
    double sigma = std::exp(policy.log_sigma[j]);
    double z = (x[j] - policy.mu[j]) / sigma;
    g.d_mu[j] = z / sigma;
    g.d_log_sigma[j] = z * z - 1.0;
  }
  return g;
}

double log_density(const GaussianPolicy& policy, const Vec& x) {
  check_dim(policy, x, "design vector");
  double lp = 0.0;
  for (size_t j = 0; j < x.size(); ++j) {
    double z = (x[j] - policy.mu[j]) / std::exp(policy.log_sigma[j]);
    lp += -policy.log_sigma[j] - 0.5 * kLogTwoPi - 0.5 * z * z;
  }
  return lp;
}

}  // namespace scoutnd
