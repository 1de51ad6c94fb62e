#pragma once

#include "lexv/smtlib.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lexv {

struct SolverConfig {
  std::string executable = "z3";
  std::vector<std::string> args = {"-in"};
  long timeout_ms = 10000;
  std::optional<long> memory_mb;
};

/// Arguments that make a known solver read SMT-LIB 2 from stdin.
std::vector<std::string> default_solver_args(const std::string& executable);

/// `--solver` value if given, else $LEXV_SOLVER, else "z3" on PATH.
SolverConfig resolve_solver_config(const std::optional<std::string>& cli_path = std::nullopt);

struct RawRun {
  std::string out;
  std::string err;
  int exit_code = 0;
  double wall_ms = 0;
};

/// Runs the solver once: writes `input` to stdin, closes it, reads stdout to
/// end. The child runs in its own process group and the whole group is
/// killed on timeout, so nothing outlives the call. Throws SolverTimeout or
/// SolverCrash (nonzero exit without output, death by signal, exec failure).
RawRun run_solver(const std::string& input, const SolverConfig& cfg);

/// run_solver + parse_reply; wall time recorded on the reply.
SolverReply run_check(const SmtScript& script, const SolverConfig& cfg);

/// Long-lived solver child fed one command at a time over pipes, for
/// incremental work (push/pop, check-sat-assuming). The per-query deadline is
/// `timeout_ms`; on timeout or crash the process group is killed and the
/// session becomes unusable. The destructor always kills the group.
class SolverProcess {
 public:
  explicit SolverProcess(const SolverConfig& cfg);
  ~SolverProcess();
  SolverProcess(const SolverProcess&) = delete;
  SolverProcess& operator=(const SolverProcess&) = delete;

  /// Sends commands that print nothing (declarations, assertions).
  void send(const std::string& commands);
  /// Sends one command and returns its single response expression. Throws
  /// SolverTimeout or SolverCrash; the session is dead afterwards.
  SExpr ask(const std::string& command);
  /// Sends one command whose response spans several expressions.
  std::vector<SExpr> ask_n(const std::string& command, std::size_t n);

  bool alive() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct Capabilities {
  std::string version;
  bool cores = false;
};

/// Sends a trivial two-assertion conflict and a version query.
Capabilities probe_solver(const SolverConfig& cfg);

/// Immutable solver handle shared by the verification layers.
class Solver {
 public:
  explicit Solver(SolverConfig cfg, std::optional<Capabilities> caps = std::nullopt)
      : cfg_(std::move(cfg)), caps_(std::move(caps)) {}

  /// Probes the executable first; throws SolverCrash when it cannot run.
  static Solver connect(SolverConfig cfg);

  SolverReply check(const SmtScript& script) const { return run_check(script, cfg_); }
  /// Throws CoresUnsupported when a probe showed the solver lacks cores.
  void require_cores() const;

  const SolverConfig& config() const noexcept { return cfg_; }
  const std::optional<Capabilities>& capabilities() const noexcept { return caps_; }

 private:
  SolverConfig cfg_;
  std::optional<Capabilities> caps_;
};

}  // namespace lexv
