#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chr {

// Library-level error with a machine-readable kind and the process exit code
// the CLI maps it to. Core algebra preconditions still throw plain std
// exceptions; these are for conditions a user can trigger through the tools.
class ChrError : public std::runtime_error {
 public:
  ChrError(std::string kind, const std::string& msg, int exit_code)
      : std::runtime_error(msg), kind_(std::move(kind)), exit_code_(exit_code) {}

  const std::string& kind() const { return kind_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string kind_;
  int exit_code_;
};

// bad values in otherwise well-formed input (exit 1)
struct DomainError : ChrError {
  explicit DomainError(const std::string& msg) : ChrError("domain", msg, 1) {}
};

// valid request outside the supported scope (exit 1)
struct UnsupportedError : ChrError {
  explicit UnsupportedError(const std::string& msg) : ChrError("unsupported", msg, 1) {}
};

// not enough data to carry out a recovery stage (exit 1)
struct InsufficientDataError : ChrError {
  explicit InsufficientDataError(const std::string& msg)
      : ChrError("insufficient-data", msg, 1) {}
};

// numeric stage cannot reach the required accuracy (exit 1)
struct PrecisionError : ChrError {
  explicit PrecisionError(const std::string& msg) : ChrError("precision", msg, 1) {}
};

// malformed file or JSON shape (exit 2)
struct FormatError : ChrError {
  explicit FormatError(const std::string& msg) : ChrError("format", msg, 2) {}
};

// filesystem trouble (exit 2)
struct IoError : ChrError {
  explicit IoError(const std::string& msg) : ChrError("io", msg, 2) {}
};

// configured budget or search envelope exhausted (exit 3)
struct ResourceError : ChrError {
  explicit ResourceError(const std::string& msg) : ChrError("resource", msg, 3) {}
};

}  // namespace chr
