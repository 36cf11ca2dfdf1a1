#include "scoutnd/math.hpp"

#include <stdexcept>

#include "scoutnd/common.hpp"

namespace scoutnd {

namespace {

// Acklam's rational approximation, |error| < 1.15e-9 over (0, 1).
double acklam_guess(double u) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  if (u < p_low) {
    double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u <= 1.0 - p_low) {
    double q = u - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  double q = std::sqrt(-2.0 * std::log(1.0 - u));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw ValueError("inverse_normal_cdf: argument must lie in (0, 1), got " +
                     format_double(u));
  }
  // Work in the lower tail only: erfc of a positive argument carries full
  // relative precision there, while 0.5*erfc(-x/sqrt(2)) near 1 quantizes at
  // ulp(1) and would cap Newton's accuracy. 1 - u is exact for u >= 0.5.
  if (u > 0.5) return -inverse_normal_cdf(1.0 - u);
  double x = acklam_guess(u);
  for (int it = 0; it < 2; ++it) {
    double err = normal_cdf(x) - u;
    double pdf = normal_pdf(x);
    if (pdf <= 0.0) break;
    x -= err / pdf;
  }
  return x;
}

}  // namespace scoutnd
