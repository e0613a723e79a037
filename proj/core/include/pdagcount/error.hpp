#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdagcount {

enum class ErrorCode {
  EmptyData,
  DegenerateData,
  NotOverdispersed,
  NonConverged,
  TooFewDistinctValues,
  AllZeroData,
  NegativeDependence,
  RankDeficientDesign,
  DimensionMismatch,
  InvalidPdag,
  InadmissibleOperator,
  NoAdmissibleFamily,
  InvalidArgument,
  ParseError,
  NegativeCount,
  MissingValue,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Errors after which a family is dropped from a selection menu instead of
// aborting the whole factor fit.
bool is_skip_error(ErrorCode code) noexcept;

// Errors caused by user-provided input (files, flags, shapes).
bool is_input_error(ErrorCode code) noexcept;

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace pdagcount
