#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pdagcount/dataset.hpp"
#include "pdagcount/error.hpp"

namespace support {

using pdagcount::Count;
using Rng = std::mt19937_64;

inline std::vector<Count> poisson_draws(std::size_t n, double lambda, Rng& rng) {
  std::poisson_distribution<Count> d(lambda);
  std::vector<Count> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

// Mean parameterization via the gamma-Poisson mixture.
inline Count negbin_draw(double size, double mean, Rng& rng) {
  std::gamma_distribution<double> g(size, mean / size);
  std::poisson_distribution<Count> p(g(rng));
  return p(rng);
}

inline std::vector<Count> negbin_draws(std::size_t n, double size, double mean, Rng& rng) {
  std::vector<Count> out(n);
  for (auto& v : out) v = negbin_draw(size, mean, rng);
  return out;
}

inline std::vector<Count> poisson_mixture_draws(std::size_t n, double w, double l1, double l2, Rng& rng) {
  std::bernoulli_distribution pick(w);
  std::vector<Count> out(n);
  for (auto& v : out) v = std::poisson_distribution<Count>(pick(rng) ? l1 : l2)(rng);
  return out;
}

inline double mean(const std::vector<Count>& x) {
  double s = 0.0;
  for (Count v : x) s += static_cast<double>(v);
  return s / static_cast<double>(x.size());
}

inline std::vector<std::string> names(std::size_t k, const char* prefix = "v") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline pdagcount::CountDataset dataset(std::vector<std::vector<Count>> cols,
                                       std::vector<std::vector<double>> covs = {}) {
  auto count_names = names(cols.size());
  auto cov_names = names(covs.size(), "x");
  return pdagcount::CountDataset(std::move(count_names), std::move(cols), std::move(cov_names), std::move(covs));
}

// The error code raised by `fn`, or nothing when it returns normally.
inline std::optional<pdagcount::ErrorCode> error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const pdagcount::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace support
