#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fnreuse {

// Base of every error raised by the library. The CLI maps the subclasses onto
// exit codes: usage/validation/configuration -> 2, everything else -> 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Malformed input text. `line` is 1-based (0 when unknown); `byte_offset` is
// set for whole-document parses.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0,
             std::size_t byte_offset = 0)
      : Error(what), line_(line), byte_offset_(byte_offset) {}
  std::size_t line() const { return line_; }
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t line_;
  std::size_t byte_offset_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Extractor reply lacks one of the four labelled sections.
class MalformedResponseError : public Error {
 public:
  explicit MalformedResponseError(const std::string& missing_label)
      : Error("malformed extraction response: missing section '" +
              missing_label + "'"),
        missing_label_(missing_label) {}
  const std::string& missing_label() const { return missing_label_; }

 private:
  std::string missing_label_;
};

class ExtractionFailedError : public Error {
 public:
  ExtractionFailedError(const std::string& subject_id, int attempts,
                        std::string last_response)
      : Error("extraction failed for '" + subject_id + "' after " +
              std::to_string(attempts) + " attempt(s)"),
        last_response_(std::move(last_response)) {}
  const std::string& last_response() const { return last_response_; }

 private:
  std::string last_response_;
};

// Remote provider failures. `retryable()` separates 429/5xx/timeouts from
// permanent 4xx rejections.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retryable, int status = 0)
      : Error(what), retryable_(retryable), status_(status) {}
  bool retryable() const { return retryable_; }
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

class RetriesExhaustedError : public TransportError {
 public:
  RetriesExhaustedError(const std::string& what, int status)
      : TransportError(what, true, status) {}
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(actual)) {}
};

}  // namespace fnreuse
