#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biaslens {

enum class ErrorCode {
  ConfigError,
  MissingStageInput,
  IoError,
  MalformedRecord,
  OutOfWindow,
  AuthError,
  RateLimited,
  TransportError,
  SchemaError,
  EmptyCorpus,
  EmptyInput,
  EmptySubset,
  DanglingRecord,
  TooLong,
  AllRunsUnparseable,
  BackendError,
  PipelineAborted,
  LockHeld,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingStageInput: return "MissingStageInput";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::DanglingRecord: return "DanglingRecord";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::AllRunsUnparseable: return "AllRunsUnparseable";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::PipelineAborted: return "PipelineAborted";
    case ErrorCode::LockHeld: return "LockHeld";
  }
  return "UnknownError";
}

/// Categorized error used across the pipeline; the CLI maps the code to an
/// exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace biaslens
