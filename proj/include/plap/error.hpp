#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- expressions -----------------------------------------------------------

class LexError : public Error {
 public:
  LexError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class UnboundSymbol : public EvalError {
 public:
  explicit UnboundSymbol(const std::string& name)
      : EvalError("unbound symbol '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// --- periodic samples ------------------------------------------------------

class ClosureError : public Error {
 public:
  using Error::Error;
};

class InconsistentChannels : public Error {
 public:
  using Error::Error;
};

// --- operators and solvers -------------------------------------------------

/// An iterate left the admissible region of a right-hand side.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class BracketFailure : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class BoundaryZero : public Error {
 public:
  using Error::Error;
};

class DegreeZero : public Error {
 public:
  using Error::Error;
};

class StepCollapse : public Error {
 public:
  using Error::Error;
};

class BoundaryHit : public Error {
 public:
  using Error::Error;
};

class BoundViolation : public Error {
 public:
  using Error::Error;
};

class MaxIter : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

// --- lower and upper solutions ---------------------------------------------

class BracketViolation : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class TailCheckFailed : public Error {
 public:
  using Error::Error;
};

// --- pipeline --------------------------------------------------------------

class HypothesisFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, std::size_t line, const std::string& what)
      : Error("config: " + (key.empty() ? std::string{} : "'" + key + "' ") +
              (line ? "line " + std::to_string(line) + ": " : std::string{}) + what),
        key_(key),
        line_(line) {}
  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace plap
