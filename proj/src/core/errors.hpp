#pragma once

#include <stdexcept>
#include <string>

namespace erc {

// Error taxonomy mirrored by the C API status codes and the CLI exit codes.
enum class ErrorKind {
  Config = 2,        // malformed or inconsistent user input (schemas, labels, simplex)
  Precondition = 3,  // a documented precondition of an operation failed
  Convergence = 4,   // an iterative solver did not reach its tolerance
  Internal = 5,      // a self-consistency check inside the library tripped
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& what) : Error(ErrorKind::Convergence, what) {}
};
struct InternalError : Error {
  explicit InternalError(const std::string& what) : Error(ErrorKind::Internal, what) {}
};

}  // namespace erc
