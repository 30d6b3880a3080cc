#include "bwf/errors.hpp"

namespace bwf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularOperator: return "SingularOperator";
    case ErrorKind::RankDeficientSurrogate: return "RankDeficientSurrogate";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::AsymmetricResponse: return "AsymmetricResponse";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace bwf
