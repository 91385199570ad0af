#pragma once

#include <stdexcept>
#include <string>

namespace srs {

/// Failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
  invalid_argument,  ///< precondition violated by the caller
  config,            ///< bad experiment configuration or CLI usage
  numerical,         ///< divergence, non-convergence, singular systems
  format,            ///< corrupt or unsupported file content
  io                 ///< filesystem failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

const char* to_string(ErrorKind kind);

}  // namespace srs
