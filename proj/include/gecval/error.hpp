#ifndef GECVAL_ERROR_HPP
#define GECVAL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gecval {

// Exit codes used by the CLI. Library code throws the typed errors below;
// the driver maps them to these codes and prints a one-line diagnostic.
enum class ExitStatus : int {
  kOk = 0,
  kValidation = 1,  // parse failures and invariant violations
  kScoring = 2,     // metric-level failures (e.g. line-count mismatch)
  kIo = 3,          // unreadable/unwritable files
};

class Error : public std::runtime_error {
 public:
  Error(ExitStatus status, std::string kind, std::string message)
      : std::runtime_error(message), status_(status), kind_(std::move(kind)) {}

  ExitStatus status() const { return status_; }
  const std::string& kind() const { return kind_; }

 private:
  ExitStatus status_;
  std::string kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, std::string file = "", long line = 0)
      : Error(ExitStatus::kValidation, "parse", locate(message, file, line)),
        file_(std::move(file)), line_(line) {}

  const std::string& file() const { return file_; }
  long line() const { return line_; }

 private:
  static std::string locate(const std::string& message, const std::string& file,
                            long line) {
    if (file.empty() && line == 0) return message;
    std::string where = file.empty() ? "<input>" : file;
    if (line > 0) where += ":" + std::to_string(line);
    return where + ": " + message;
  }

  std::string file_;
  long line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::string message)
      : Error(ExitStatus::kValidation, "validate", std::move(message)) {}
};

class ScoringError : public Error {
 public:
  explicit ScoringError(std::string message)
      : Error(ExitStatus::kScoring, "scoring", std::move(message)) {}
};

class IoError : public Error {
 public:
  explicit IoError(std::string message)
      : Error(ExitStatus::kIo, "io", std::move(message)) {}
};

}  // namespace gecval

#endif  // GECVAL_ERROR_HPP
