#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdagcount/error.hpp"

namespace pdagcount::detail {

// Root of a negative binomial size score. Newton steps on log(size) inside a
// sign bracket (score > 0 below the root, < 0 above), bisecting
// geometrically whenever a step leaves the bracket.
template <class Score, class Hessian>
double solve_size(Score&& score, Hessian&& hessian, double start, double tolerance,
                  int max_iterations = 200) {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double r = start > 0.0 && std::isfinite(start) ? start : 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const double s = score(r);
    if (!std::isfinite(s)) fail(ErrorCode::NonConverged, "non-finite negative binomial score");
    if (std::abs(s) <= tolerance) return r;
    if (s > 0.0)
      lo = r;
    else
      hi = r;
    if (lo > 0.0 && std::isfinite(hi) && hi / lo - 1.0 < 4.0 * std::numeric_limits<double>::epsilon())
      return r;

    const double slope = hessian(r) * r;  // d score / d log r
    double next = r;
    if (slope < 0.0 && std::isfinite(slope)) next = r * std::exp(std::clamp(-s / slope, -5.0, 5.0));
    if (!(next > lo && next < hi) || next == r) {
      if (!std::isfinite(hi))
        next = r * 10.0;
      else if (lo == 0.0)
        next = hi / 10.0;
      else
        next = std::sqrt(lo * hi);
    }
    if (next > 1e10) fail(ErrorCode::NotOverdispersed, "negative binomial size diverges");
    r = next;
  }
  fail(ErrorCode::NonConverged, "negative binomial size did not converge");
}

}  // namespace pdagcount::detail
