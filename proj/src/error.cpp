#include "evident/error.hpp"

namespace evident {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPayload: return "EmptyPayload";
    case ErrorCode::InvalidOutcome: return "InvalidOutcome";
    case ErrorCode::MalformedPayload: return "MalformedPayload";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::SingleObservationViolation: return "SingleObservationViolation";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::InvalidPremise: return "InvalidPremise";
    case ErrorCode::InvalidWinner: return "InvalidWinner";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::NotATest: return "NotATest";
    case ErrorCode::ValidationRejected: return "ValidationRejected";
    case ErrorCode::ChainCorrupt: return "ChainCorrupt";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::NotDeduction: return "NotDeduction";
    case ErrorCode::Unclassifiable: return "Unclassifiable";
    case ErrorCode::NotAHypothesis: return "NotAHypothesis";
    case ErrorCode::WinnerConflict: return "WinnerConflict";
    case ErrorCode::ResultInvalid: return "ResultInvalid";
    case ErrorCode::NotSelectable: return "NotSelectable";
    case ErrorCode::UnknownHypothesis: return "UnknownHypothesis";
    case ErrorCode::UnknownObservation: return "UnknownObservation";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::AmbiguousId: return "AmbiguousId";
    case ErrorCode::NoWorkspace: return "NoWorkspace";
    case ErrorCode::WorkspaceExists: return "WorkspaceExists";
    case ErrorCode::WorkspaceLocked: return "WorkspaceLocked";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {
std::string compose_what(ErrorCode code, std::optional<ErrorCode> cause,
                         const std::string& message) {
  std::string out(to_string(code));
  if (cause) {
    out += "(";
    out += to_string(*cause);
    out += ")";
  }
  if (!message.empty()) {
    out += ": ";
    out += message;
  }
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::vector<std::string> ids, std::optional<ErrorCode> cause)
    : std::runtime_error(compose_what(code, cause, message)),
      code_(code),
      cause_(cause),
      ids_(std::move(ids)),
      message_(message) {}

std::string Error::name() const {
  std::string out(to_string(code_));
  if (cause_) {
    out += "(";
    out += to_string(*cause_);
    out += ")";
  }
  return out;
}

void reject(const Error& inner) {
  if (inner.code() == ErrorCode::ValidationRejected) throw inner;
  throw Error(ErrorCode::ValidationRejected, inner.message(), inner.ids(),
              inner.code());
}

}  // namespace evident
