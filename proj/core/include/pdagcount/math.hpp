#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace pdagcount {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Reentrant log-gamma; std::lgamma writes the global signgam on glibc.
double log_gamma(double x) noexcept;

inline double log_factorial(double k) noexcept { return log_gamma(k + 1.0); }

// x * log(y) with the convention 0 * log(0) = 0.
inline double xlogy(double x, double y) noexcept {
  if (x == 0.0) return 0.0;
  return x * std::log(y);
}

double log_sum_exp(std::span<const double> values) noexcept;

inline double log_sum_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double poisson_logpmf(long long k, double lambda) noexcept;
double binomial_logpmf(long long k, long long trials, double prob) noexcept;
// Parameterized by size r and success probability p: mean = r (1 - p) / p.
double negbin_logpmf(long long k, double size, double prob) noexcept;

double digamma(double x);
double trigamma(double x);

}  // namespace pdagcount
