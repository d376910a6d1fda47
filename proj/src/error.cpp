#include "trafficfit/error.hpp"

namespace trafficfit {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::NoData: return "no_data";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::DegenerateFit: return "degenerate_fit";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::UndefinedCorrelation: return "undefined_correlation";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace trafficfit
