#pragma once

#include <stdexcept>
#include <string>

namespace dynppr {

enum class ErrorCode {
  kInvalidEvent,
  kUnknownNode,
  kInvalidArgument,
  kTooLarge,
  kSingularSystem,
  kNoConvergence,
  kDegreeUnderflow,
  kInfeasibleSpec,
  kParse,
  kConfig,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dynppr
