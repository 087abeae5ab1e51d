#include "superlap/error.hpp"

namespace superlap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ZeroDensity: return "ZeroDensity";
    case ErrorCode::ZeroHighMass: return "ZeroHighMass";
    case ErrorCode::NegativeHighAtom: return "NegativeHighAtom";
    case ErrorCode::NonMonotoneSeries: return "NonMonotoneSeries";
    case ErrorCode::CriticalExponent: return "CriticalExponent";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace superlap
