#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pathprompt {

enum class ErrorCode {
  UnreadableSource,
  NotFound,
  Ambiguous,
  BudgetExceeded,
  BackendUnavailable,
  ReplayMiss,
  SandboxCrash,
  ProtocolError,
  InvalidConfig,
  InvalidInput,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pathprompt
