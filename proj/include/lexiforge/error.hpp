#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexiforge {

enum class ErrorCode {
  malformed,
  encoding,
  io,
  bad_category,
  duplicate_conflict,
  parse,
  dimension_mismatch,
  length_mismatch,
  overlapping_spans,
  insufficient_blocks,
  empty_train_set,
  divergence,
  unknown_id,
  corrupt_state,
  config,
  locked,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed: return "malformed";
    case ErrorCode::encoding: return "encoding";
    case ErrorCode::io: return "io_error";
    case ErrorCode::bad_category: return "bad_category";
    case ErrorCode::duplicate_conflict: return "duplicate_conflict";
    case ErrorCode::parse: return "parse";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::overlapping_spans: return "overlapping_spans";
    case ErrorCode::insufficient_blocks: return "insufficient_blocks";
    case ErrorCode::empty_train_set: return "empty_train_set";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::unknown_id: return "unknown_id";
    case ErrorCode::corrupt_state: return "corrupt_state";
    case ErrorCode::config: return "config";
    case ErrorCode::locked: return "locked";
  }
  return "unknown";
}

// Every recoverable failure in the library is reported as an Error carrying
// a machine-checkable code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lexiforge
