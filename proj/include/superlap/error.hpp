#pragma once

#include <stdexcept>
#include <string>

namespace superlap {

enum class ErrorCode {
  InvalidArgument,
  DomainError,
  ZeroDensity,
  ZeroHighMass,      // mu+([s_bar,1]) == 0
  NegativeHighAtom,  // mu- charges [s_bar,1]
  NonMonotoneSeries,
  CriticalExponent,  // N <= s_sharp * p
  NoCrossing,
  Diverged,
  Config,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Throws Error(code, message) unless `cond` holds.
inline void require(bool cond, ErrorCode code, const std::string& message) {
  if (!cond) throw Error(code, message);
}

}  // namespace superlap
