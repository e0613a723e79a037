#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pdagcount {

using Count = long long;

// n observations of K count variables plus optional real-valued covariates.
// Storage is column-major: one vector per variable.
class CountDataset {
 public:
  CountDataset() = default;
  CountDataset(std::vector<std::string> count_names, std::vector<std::vector<Count>> counts,
               std::vector<std::string> covariate_names = {},
               std::vector<std::vector<double>> covariates = {});

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_vars() const noexcept { return counts_.size(); }
  std::size_t n_covariates() const noexcept { return covariates_.size(); }

  const std::vector<Count>& column(std::size_t var) const { return counts_.at(var); }
  const std::vector<double>& covariate(std::size_t idx) const { return covariates_.at(idx); }
  Count at(std::size_t row, std::size_t var) const { return counts_[var][row]; }

  const std::vector<std::string>& count_names() const noexcept { return count_names_; }
  const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }

  std::vector<Count> count_row(std::size_t row) const;
  std::vector<double> covariate_row(std::size_t row) const;

  // 64-bit FNV-1a digest of the canonical byte serialization (shape, names,
  // counts, covariate bit patterns). Computed once at construction.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  friend bool operator==(const CountDataset& a, const CountDataset& b);

 private:
  std::vector<std::string> count_names_;
  std::vector<std::vector<Count>> counts_;
  std::vector<std::string> covariate_names_;
  std::vector<std::vector<double>> covariates_;
  std::size_t n_rows_ = 0;
  std::uint64_t fingerprint_ = 0;
};

// Row-major view of selected count columns, used by multivariate fitters.
using CountMatrix = std::vector<std::vector<Count>>;

CountMatrix gather_rows(const CountDataset& data, std::span<const int> vars);

}  // namespace pdagcount
