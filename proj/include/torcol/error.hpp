#pragma once

#include <stdexcept>
#include <string>

namespace torcol {

enum class ErrorCode {
  InvalidArgument = 1,
  BudgetExceeded = 2,
  ImproperColoring = 3,
  BadValue = 4,
  LengthMismatch = 5,
  HypothesisViolated = 6,
  NotMixed = 7,
  Io = 8,
  VerificationFailed = 9,
  NotInImage = 10,
  Reducible = 11,
};

// Base error for everything the library throws. The code survives the trip
// across the C boundary; the message carries the witness.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::BudgetExceeded: return "budget_exceeded";
    case ErrorCode::ImproperColoring: return "improper_coloring";
    case ErrorCode::BadValue: return "bad_value";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::HypothesisViolated: return "hypothesis_violated";
    case ErrorCode::NotMixed: return "not_mixed";
    case ErrorCode::Io: return "io";
    case ErrorCode::VerificationFailed: return "verification_failed";
    case ErrorCode::NotInImage: return "not_in_image";
    case ErrorCode::Reducible: return "reducible";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace torcol
