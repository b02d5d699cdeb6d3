#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace erasure {

/// Runtime failure: bad input data, I/O, or an operation precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or command line. Mapped to exit code 2 by the CLI.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal diagnostics. Goes to stderr unless a handler is installed.
void warn(std::string_view message);

/// Replaces the warning handler for the lifetime of the object (tests use this
/// to capture warnings). Not intended for concurrent installation.
class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(std::function<void(std::string_view)> handler);
  ~ScopedWarningHandler();
  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

 private:
  std::function<void(std::string_view)> previous_;
};

}  // namespace erasure
