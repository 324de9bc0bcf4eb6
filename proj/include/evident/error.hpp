#pragma once

// evident/error.hpp: engine error codes and the exception that carries them.
//
// Every engine failure is an evident::Error. The code is stable and is what
// the CLI prints and the HTTP service maps to a status; the message is for
// humans. ValidationRejected wraps the model-level code that caused a log
// append to be refused (see cause()).

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evident {

enum class ErrorCode {
  // container construction
  EmptyPayload,
  InvalidOutcome,
  MalformedPayload,
  IdMismatch,
  // associations and snapshot structure
  InvalidTarget,
  KindMismatch,
  SingleObservationViolation,
  CycleDetected,
  InvalidPremise,
  InvalidWinner,
  DanglingReference,
  NotATest,
  // event log
  ValidationRejected,
  ChainCorrupt,
  MalformedInput,
  // knowledge views
  NotDeduction,
  Unclassifiable,
  NotAHypothesis,
  // algebra
  WinnerConflict,
  ResultInvalid,
  NotSelectable,
  UnknownHypothesis,
  UnknownObservation,
  // workspace / front ends
  UnknownId,
  AmbiguousId,
  NoWorkspace,
  WorkspaceExists,
  WorkspaceLocked,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> ids = {},
        std::optional<ErrorCode> cause = std::nullopt);

  ErrorCode code() const { return code_; }
  std::optional<ErrorCode> cause() const { return cause_; }
  // The innermost code: the cause for wrapped errors, else code().
  ErrorCode root() const { return cause_.value_or(code_); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& message() const { return message_; }
  // "ValidationRejected(SingleObservationViolation)" or just the code name.
  std::string name() const;

 private:
  ErrorCode code_;
  std::optional<ErrorCode> cause_;
  std::vector<std::string> ids_;
  std::string message_;
};

// Re-throws `inner` wrapped as ValidationRejected, keeping ids and message.
[[noreturn]] void reject(const Error& inner);

}  // namespace evident
