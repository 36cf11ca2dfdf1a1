#pragma once

#include <cmath>

namespace scoutnd {

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// Standard normal CDF via erfc; accurate in both tails.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.39894228040143267794;
}

// Inverse standard normal CDF. Rational initial guess (Acklam) polished with
// two Newton steps on erfc, giving absolute error well under 1e-9 on
// [1e-12, 1 - 1e-12].
double inverse_normal_cdf(double u);

}  // namespace scoutnd
