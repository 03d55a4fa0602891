#pragma once

#include <stdexcept>
#include <string>

namespace qb {

enum class ErrorCode {
  InvalidArgument,
  EigenFailure,
  AnalysisFailure,
};

// Single exception type for the library; the C API maps `code()` onto its
// status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace qb
