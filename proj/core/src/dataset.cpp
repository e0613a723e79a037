#include "pdagcount/dataset.hpp"

#include <bit>
#include <cstring>

#include "pdagcount/error.hpp"

namespace pdagcount {
namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(buf, 8);
  }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace

CountDataset::CountDataset(std::vector<std::string> count_names,
                           std::vector<std::vector<Count>> counts,
                           std::vector<std::string> covariate_names,
                           std::vector<std::vector<double>> covariates)
    : count_names_(std::move(count_names)),
      counts_(std::move(counts)),
      covariate_names_(std::move(covariate_names)),
      covariates_(std::move(covariates)) {
  if (count_names_.size() != counts_.size())
    fail(ErrorCode::DimensionMismatch, "count names and columns differ in number");
  if (covariate_names_.size() != covariates_.size())
    fail(ErrorCode::DimensionMismatch, "covariate names and columns differ in number");
  n_rows_ = counts_.empty() ? (covariates_.empty() ? 0 : covariates_.front().size())
                            : counts_.front().size();
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    if (counts_[j].size() != n_rows_)
      fail(ErrorCode::DimensionMismatch, "count column '" + count_names_[j] + "' has wrong length");
    for (std::size_t i = 0; i < n_rows_; ++i)
      if (counts_[j][i] < 0)
        fail(ErrorCode::NegativeCount, "row " + std::to_string(i) + ", column '" +
                                           count_names_[j] + "'");
  }
  for (std::size_t j = 0; j < covariates_.size(); ++j)
    if (covariates_[j].size() != n_rows_)
      fail(ErrorCode::DimensionMismatch,
           "covariate column '" + covariate_names_[j] + "' has wrong length");

  Fnv1a h;
  h.u64(n_rows_);
  h.u64(counts_.size());
  h.u64(covariates_.size());
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    h.str(count_names_[j]);
    for (Count v : counts_[j]) h.u64(static_cast<std::uint64_t>(v));
  }
  for (std::size_t j = 0; j < covariates_.size(); ++j) {
    h.str(covariate_names_[j]);
    for (double v : covariates_[j]) h.u64(std::bit_cast<std::uint64_t>(v));
  }
  fingerprint_ = h.digest();
}

std::vector<Count> CountDataset::count_row(std::size_t row) const {
  std::vector<Count> out(counts_.size());
  for (std::size_t j = 0; j < counts_.size(); ++j) out[j] = counts_[j][row];
  return out;
}

std::vector<double> CountDataset::covariate_row(std::size_t row) const {
  std::vector<double> out(covariates_.size());
  for (std::size_t j = 0; j < covariates_.size(); ++j) out[j] = covariates_[j][row];
  return out;
}

bool operator==(const CountDataset& a, const CountDataset& b) {
  return a.n_rows_ == b.n_rows_ && a.count_names_ == b.count_names_ && a.counts_ == b.counts_ &&
         a.covariate_names_ == b.covariate_names_ && a.covariates_ == b.covariates_;
}

CountMatrix gather_rows(const CountDataset& data, std::span<const int> vars) {
  CountMatrix rows(data.n_rows(), std::vector<Count>(vars.size()));
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const auto& col = data.column(static_cast<std::size_t>(vars[k]));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i][k] = col[i];
  }
  return rows;
}

}  // namespace pdagcount
