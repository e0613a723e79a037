#include "pdagcount/error.hpp"

namespace pdagcount {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NotOverdispersed: return "NotOverdispersed";
    case ErrorCode::NonConverged: return "NonConverged";
    case ErrorCode::TooFewDistinctValues: return "TooFewDistinctValues";
    case ErrorCode::AllZeroData: return "AllZeroData";
    case ErrorCode::NegativeDependence: return "NegativeDependence";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidPdag: return "InvalidPdag";
    case ErrorCode::InadmissibleOperator: return "InadmissibleOperator";
    case ErrorCode::NoAdmissibleFamily: return "NoAdmissibleFamily";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool is_skip_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotOverdispersed:
    case ErrorCode::NegativeDependence:
    case ErrorCode::DegenerateData:
    case ErrorCode::NonConverged:
    case ErrorCode::TooFewDistinctValues:
    case ErrorCode::AllZeroData:
    case ErrorCode::RankDeficientDesign:
      return true;
    default:
      return false;
  }
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NegativeCount:
    case ErrorCode::MissingValue:
    case ErrorCode::FormatError:
    case ErrorCode::IoError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidPdag:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptyData:
      return true;
    default:
      return false;
  }
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace pdagcount
