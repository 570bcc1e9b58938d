#pragma once

#include <stdexcept>
#include <string>

namespace reascirc {

enum class ErrorKind {
  Io,            // file not found, write failure
  Parse,         // malformed JSON / unreadable input
  Schema,        // well-formed input missing or mistyping a required field
  Validation,    // annotation records violating structural rules
  Config,        // bad mode/flag combination
  Contract,      // API misuse (wrong slots, wrong arity, empty input)
  Capacity,      // pool too small for the requested sample
  ScriptedMiss,  // scripted backend has no entry for the key
  PromptDrift,   // scripted key hit but prompt text differs
  BackendUnavailable,  // retries exhausted on timeout/connection/5xx
  BackendRequest,      // HTTP 4xx, no retry
  BackendProtocol,     // malformed response body
  Run,                 // circuit aborted (generative parse failure, reject mode)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Config: return "config";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::ScriptedMiss: return "scripted-miss";
    case ErrorKind::PromptDrift: return "prompt-drift";
    case ErrorKind::BackendUnavailable: return "backend-unavailable";
    case ErrorKind::BackendRequest: return "backend-request";
    case ErrorKind::BackendProtocol: return "backend-protocol";
    case ErrorKind::Run: return "run";
  }
  return "unknown";
}

}  // namespace reascirc
