#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lexv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the evaluator when it reaches a variable with no value.
class FreeVariableEncountered : public Error {
 public:
  explicit FreeVariableEncountered(std::string name)
      : Error("free variable encountered: " + name), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero") {}
};

class SortError : public Error {
 public:
  using Error::Error;
};

class UnsupportedExpr : public Error {
 public:
  using Error::Error;
};

/// Malformed solver output. Carries the offending excerpt so the repair loop
/// can feed it back verbatim.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string excerpt)
      : Error(what + ": " + excerpt), excerpt_(std::move(excerpt)) {}
  const std::string& excerpt() const noexcept { return excerpt_; }

 private:
  std::string excerpt_;
};

class SolverTimeout : public Error {
 public:
  explicit SolverTimeout(long timeout_ms, long lower_bound = -1)
      : Error("solver timed out after " + std::to_string(timeout_ms) + " ms"),
        timeout_ms_(timeout_ms),
        lower_bound_(lower_bound) {}
  long timeout_ms() const noexcept { return timeout_ms_; }
  /// Best certified lower bound on the correction cost, or -1 when unknown.
  long lower_bound() const noexcept { return lower_bound_; }
  SolverTimeout with_lower_bound(long lb) const { return SolverTimeout(timeout_ms_, lb); }

 private:
  long timeout_ms_;
  long lower_bound_;
};

class SolverCrash : public Error {
 public:
  SolverCrash(int exit_code, std::string stderr_excerpt)
      : Error("solver crashed (exit " + std::to_string(exit_code) + "): " + stderr_excerpt),
        exit_code_(exit_code),
        stderr_excerpt_(std::move(stderr_excerpt)) {}
  int exit_code() const noexcept { return exit_code_; }
  const std::string& stderr_excerpt() const noexcept { return stderr_excerpt_; }

 private:
  int exit_code_;
  std::string stderr_excerpt_;
};

class CoresUnsupported : public Error {
 public:
  CoresUnsupported()
      : Error("configured solver does not produce unsat cores; core-dependent operations are disabled") {}
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class NoFeasibleCompliance : public Error {
 public:
  NoFeasibleCompliance() : Error("no feasible compliance: hard constraints inconsistent") {}
};

class InvalidBundle : public Error {
 public:
  InvalidBundle(const std::string& what, std::vector<std::string> details)
      : Error(what), details_(std::move(details)) {}
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  std::vector<std::string> details_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class VersionConflict : public Error {
 public:
  VersionConflict(long expected, long actual)
      : Error("version conflict: expected " + std::to_string(expected) + ", store has " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}
  long expected() const noexcept { return expected_; }
  long actual() const noexcept { return actual_; }

 private:
  long expected_;
  long actual_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("embedding dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

class DuplicateDoc : public Error {
 public:
  explicit DuplicateDoc(const std::string& id) : Error("duplicate doc_id: " + id) {}
};

/// A retrieval or generation port failed while serving `query`.
class PortFailure : public Error {
 public:
  PortFailure(std::string query, const std::string& what)
      : Error("port failure on query '" + query + "': " + what), query_(std::move(query)) {}
  const std::string& query() const noexcept { return query_; }

 private:
  std::string query_;
};

class EmptyGeneration : public Error {
 public:
  using Error::Error;
};

/// Transport or protocol failure talking to a live completion endpoint.
class LlmError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexv
