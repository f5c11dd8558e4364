#pragma once

#include <stdexcept>
#include <string>

namespace musecp {

/// Machine-readable failure categories. Metric-level conditions (no_key,
/// no_tempo, ...) are caught by the harness and turned into missing-metric
/// records; the rest abort the operation that raised them.
enum class ErrorCode {
  io_error,              // unreadable / unwritable file
  unsupported_encoding,  // WAV format we do not decode
  empty_audio,           // zero-length or sub-minimum clip
  invalid_argument,      // parameter outside its documented range
  parse_error,           // malformed manifest / config input
  no_key,                // key estimation impossible (all-silent input)
  no_tempo,              // tempo estimation impossible
  degenerate_input,      // metric precondition unmet (e.g. zero common span)
};

class McpError : public std::runtime_error {
public:
  McpError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::unsupported_encoding: return "unsupported-encoding";
    case ErrorCode::empty_audio: return "empty-audio";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::no_key: return "no-key";
    case ErrorCode::no_tempo: return "no-tempo";
    case ErrorCode::degenerate_input: return "degenerate-input";
  }
  return "unknown";
}

}  // namespace musecp
