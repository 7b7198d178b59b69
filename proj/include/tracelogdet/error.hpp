#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tracelogdet {

enum class ErrorCode {
  invalid_argument,
  overflow,
  cancellation,
  infeasible,
  solver_stalled,
  degenerate,
  undefined,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every recoverable failure in the library is reported through this type so
// callers can branch on the code instead of parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for failures of the numerics rather than of the caller's input.
  bool numerical() const noexcept {
    return code_ == ErrorCode::overflow || code_ == ErrorCode::cancellation ||
           code_ == ErrorCode::infeasible || code_ == ErrorCode::solver_stalled ||
           code_ == ErrorCode::degenerate || code_ == ErrorCode::undefined;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::invalid_argument, what);
}

}  // namespace tracelogdet
