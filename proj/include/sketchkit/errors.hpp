#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sketchkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NotADirectory : public IoError {
 public:
  using IoError::IoError;
};

/// Malformed repository-sketch text. `line` is 1-based.
class SketchParseError : public Error {
 public:
  SketchParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Source text rejected by the target-language grammar.
class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, std::size_t line, std::size_t column, std::string path = {})
      : Error(format(message, line, column, path)),
        message_(std::move(message)),
        line_(line),
        column_(column),
        path_(std::move(path)) {}

  const std::string& message() const { return message_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& path() const { return path_; }

  SyntaxError with_path(std::string path) const {
    return SyntaxError(message_, line_, column_, std::move(path));
  }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column,
                            const std::string& path) {
    std::string where = path.empty() ? std::string() : path + ":";
    return where + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
  std::string path_;
};

class SlotNotFound : public Error {
 public:
  explicit SlotNotFound(const std::string& name) : Error("no placeholder body for '" + name + "'") {}
};

class IndentationError : public Error {
 public:
  using Error::Error;
};

class MissingReadme : public Error {
 public:
  explicit MissingReadme(const std::string& repo) : Error("no README found in " + repo) {}
};

class TargetNotInSketch : public Error {
 public:
  explicit TargetNotInSketch(const std::string& target)
      : Error("target not present in sketch: " + target) {}
};

class EmptyPayload : public Error {
 public:
  EmptyPayload() : Error("response carries no payload") {}
};

class StagePayloadInvalid : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class BackendTimeout : public BackendError {
 public:
  using BackendError::BackendError;
};

class BackendHttpError : public BackendError {
 public:
  BackendHttpError(int status, const std::string& what) : BackendError(what), status_(status) {}
  /// HTTP status, or 0 when no response was received at all.
  int status() const { return status_; }

 private:
  int status_;
};

class ReplayMiss : public BackendError {
 public:
  explicit ReplayMiss(const std::string& hash)
      : BackendError("replay archive has no entry for request " + hash), hash_(hash) {}
  const std::string& hash() const { return hash_; }

 private:
  std::string hash_;
};

class PipelineAborted : public Error {
 public:
  using Error::Error;
};

class OutputNotEmpty : public IoError {
 public:
  using IoError::IoError;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyRepository : public Error {
 public:
  using Error::Error;
};

}  // namespace sketchkit
