#include "pdagcount/math.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace pdagcount {

double log_gamma(double x) noexcept {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_sum_exp(std::span<const double> values) noexcept {
  if (values.empty()) return kNegInf;
  const double m = *std::max_element(values.begin(), values.end());
  if (m == kNegInf) return kNegInf;
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

double poisson_logpmf(long long k, double lambda) noexcept {
  if (k < 0) return kNegInf;
  if (lambda <= 0.0) return k == 0 ? 0.0 : kNegInf;
  return static_cast<double>(k) * std::log(lambda) - lambda - log_factorial(static_cast<double>(k));
}

double binomial_logpmf(long long k, long long trials, double prob) noexcept {
  if (k < 0 || k > trials) return kNegInf;
  const double kd = static_cast<double>(k);
  const double rest = static_cast<double>(trials - k);
  if (prob <= 0.0) return k == 0 ? 0.0 : kNegInf;
  if (prob >= 1.0) return k == trials ? 0.0 : kNegInf;
  return log_factorial(static_cast<double>(trials)) - log_factorial(kd) - log_factorial(rest) +
         kd * std::log(prob) + rest * std::log1p(-prob);
}

double negbin_logpmf(long long k, double size, double prob) noexcept {
  if (k < 0) return kNegInf;
  const double kd = static_cast<double>(k);
  return log_gamma(kd + size) - log_gamma(size) - log_factorial(kd) + size * std::log(prob) +
         xlogy(kd, 1.0 - prob);
}

double digamma(double x) { return boost::math::digamma(x); }
double trigamma(double x) { return boost::math::trigamma(x); }

}  // namespace pdagcount
