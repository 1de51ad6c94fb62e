#include "lexv/solver.hpp"

#include "lexv/errors.hpp"
#include "lexv/sexpr.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <mutex>

#include <fcntl.h>
#include <poll.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

namespace lexv {

std::vector<std::string> default_solver_args(const std::string& executable) {
  const std::string base = std::filesystem::path(executable).filename().string();
  if (base.rfind("z3", 0) == 0) return {"-in"};
  if (base.rfind("cvc5", 0) == 0 || base.rfind("cvc4", 0) == 0) return {"--lang=smt2"};
  return {};
}

SolverConfig resolve_solver_config(const std::optional<std::string>& cli_path) {
  SolverConfig cfg;
  if (cli_path && !cli_path->empty()) {
    cfg.executable = *cli_path;
  } else if (const char* env = std::getenv("LEXV_SOLVER"); env && *env) {
    cfg.executable = env;
  }
  cfg.args = default_solver_args(cfg.executable);
  return cfg;
}

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(o.release()) {}
  Fd& operator=(Fd&& o) noexcept {
    reset(o.release());
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  int release() {
    int f = fd_;
    fd_ = -1;
    return f;
  }
  void reset(int f = -1) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = f;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read, write;
};

Pipe make_pipe() {
  int p[2];
  if (::pipe2(p, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  return {Fd(p[0]), Fd(p[1])};
}

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string tail(const std::string& s, std::size_t n = 400) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

}  // namespace

namespace {

struct Child {
  pid_t pid = -1;
  Pipe in, out, err;
};

Child spawn(const SolverConfig& cfg) {
  ignore_sigpipe();
  std::vector<std::string> argv_s;
  argv_s.push_back(cfg.executable);
  argv_s.insert(argv_s.end(), cfg.args.begin(), cfg.args.end());
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  argv.push_back(nullptr);

  Child ch;
  ch.in = make_pipe();
  ch.out = make_pipe();
  ch.err = make_pipe();
  Pipe exec_err = make_pipe();
  const rlim_t mem = cfg.memory_mb ? static_cast<rlim_t>(*cfg.memory_mb) * 1024 * 1024 : 0;

  pid_t pid = ::fork();
  if (pid < 0) throw Error(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    if (mem) {
      struct rlimit rl {mem, mem};
      ::setrlimit(RLIMIT_AS, &rl);
    }
    ::dup2(ch.in.read.get(), 0);
    ::dup2(ch.out.write.get(), 1);
    ::dup2(ch.err.write.get(), 2);
    ::execvp(argv[0], argv.data());
    int e = errno;
    [[maybe_unused]] auto n = ::write(exec_err.write.get(), &e, sizeof e);
    ::_exit(127);
  }
  ::setpgid(pid, pid);  // both sides set it; whichever runs first wins
  ch.pid = pid;

  ch.in.read.reset();
  ch.out.write.reset();
  ch.err.write.reset();
  exec_err.write.reset();

  int exec_errno = 0;
  if (::read(exec_err.read.get(), &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    ::waitpid(pid, nullptr, 0);
    throw SolverCrash(127, "cannot execute '" + cfg.executable + "': " + std::strerror(exec_errno));
  }
  return ch;
}

void kill_group(pid_t pid) {
  ::kill(-pid, SIGKILL);
  ::kill(pid, SIGKILL);
  while (::waitpid(pid, nullptr, 0) < 0 && errno == EINTR) {
  }
}

}  // namespace

RawRun run_solver(const std::string& input, const SolverConfig& cfg) {
  if (cfg.timeout_ms <= 0) throw Error("solver timeout must be positive");
  const auto start = std::chrono::steady_clock::now();
  Child ch = spawn(cfg);
  const pid_t pid = ch.pid;
  Pipe& in = ch.in;
  Pipe& out = ch.out;
  Pipe& err = ch.err;

  ::fcntl(in.write.get(), F_SETFL, O_NONBLOCK);
  RawRun run;
  std::size_t written = 0;
  if (input.empty()) in.write.reset();
  const auto deadline = start + std::chrono::milliseconds(cfg.timeout_ms);
  bool timed_out = false;
  char buf[8192];

  while (out.read.get() >= 0 || err.read.get() >= 0) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    pollfd fds[3];
    int nfds = 0;
    int idx_in = -1, idx_out = -1, idx_err = -1;
    if (in.write.get() >= 0) { idx_in = nfds; fds[nfds++] = {in.write.get(), POLLOUT, 0}; }
    if (out.read.get() >= 0) { idx_out = nfds; fds[nfds++] = {out.read.get(), POLLIN, 0}; }
    if (err.read.get() >= 0) { idx_err = nfds; fds[nfds++] = {err.read.get(), POLLIN, 0}; }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    int rc = ::poll(fds, nfds, static_cast<int>(std::max<long long>(1, left)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (idx_in >= 0 && fds[idx_in].revents) {
      if (fds[idx_in].revents & (POLLERR | POLLHUP)) {
        in.write.reset();
      } else {
        ssize_t n = ::write(in.write.get(), input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if ((n < 0 && errno != EAGAIN) || written == input.size()) in.write.reset();
      }
    }
    auto drain = [&](int idx, Fd& fd, std::string& sink) {
      if (idx < 0 || !fds[idx].revents) return;
      ssize_t n = ::read(fd.get(), buf, sizeof buf);
      if (n > 0) {
        sink.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        fd.reset();
      }
    };
    drain(idx_out, out.read, run.out);
    drain(idx_err, err.read, run.err);
  }

  if (timed_out) {
    kill_group(pid);
    throw SolverTimeout(cfg.timeout_ms);
  }

  // Wait without reaping so the group id stays reserved, clear out anything
  // the solver forked into its group, then reap.
  siginfo_t info{};
  while (::waitid(P_PID, static_cast<id_t>(pid), &info, WEXITED | WNOWAIT) < 0 && errno == EINTR) {
  }
  ::kill(-pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  run.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (WIFSIGNALED(status)) throw SolverCrash(128 + WTERMSIG(status), tail(run.err));
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (run.exit_code != 0 && run.out.find_first_not_of(" \t\r\n") == std::string::npos)
    throw SolverCrash(run.exit_code, tail(run.err));
  return run;
}

SolverReply run_check(const SmtScript& script, const SolverConfig& cfg) {
  RawRun run = run_solver(script.text, cfg);
  SolverReply reply = parse_reply(run.out, script);
  reply.wall_ms = run.wall_ms;
  return reply;
}

struct SolverProcess::Impl {
  SolverConfig cfg;
  Child ch;
  std::string pending;  // stdout read past the last response
  std::string err;
  bool dead = false;

  ~Impl() {
    if (ch.pid > 0) kill_group(ch.pid);
  }

  [[noreturn]] void fail_crash() {
    dead = true;
    int status = 0;
    ::kill(-ch.pid, SIGKILL);
    while (::waitpid(ch.pid, &status, 0) < 0 && errno == EINTR) {
    }
    ch.pid = -1;
    const int code = WIFSIGNALED(status) ? 128 + WTERMSIG(status) : WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    throw SolverCrash(code, tail(err));
  }

  [[noreturn]] void fail_timeout() {
    dead = true;
    kill_group(ch.pid);
    ch.pid = -1;
    throw SolverTimeout(cfg.timeout_ms);
  }

  /// Writes `input` and, when `want` > 0, reads that many complete
  /// expressions, all under one deadline.
  std::vector<SExpr> exchange(const std::string& input, std::size_t want) {
    if (dead) throw SolverCrash(-1, "solver session is no longer usable");
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(cfg.timeout_ms);
    std::vector<SExpr> got;
    auto take = [&] {
      for (;;) {
        if (got.size() >= want) return;
        std::size_t end = first_sexpr_end(pending);
        if (end == std::string_view::npos) return;
        auto items = parse_sexprs(std::string_view(pending).substr(0, end));
        pending.erase(0, end);
        for (auto& it : items) got.push_back(std::move(it));
      }
    };
    std::size_t written = 0;
    char buf[8192];
    take();
    while (written < input.size() || got.size() < want) {
      auto now = std::chrono::steady_clock::now();
      if (now >= deadline) fail_timeout();
      pollfd fds[3];
      int nfds = 0;
      int idx_in = -1;
      if (written < input.size()) {
        idx_in = nfds;
        fds[nfds++] = {ch.in.write.get(), POLLOUT, 0};
      }
      const int idx_out = nfds;
      fds[nfds++] = {ch.out.read.get(), POLLIN, 0};
      const int idx_err = ch.err.read.get() >= 0 ? nfds : -1;
      if (idx_err >= 0) fds[nfds++] = {ch.err.read.get(), POLLIN, 0};
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      int rc = ::poll(fds, nfds, static_cast<int>(std::max<long long>(1, left)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        fail_crash();
      }
      if (idx_in >= 0 && fds[idx_in].revents) {
        if (fds[idx_in].revents & (POLLERR | POLLHUP)) fail_crash();
        ssize_t n = ::write(ch.in.write.get(), input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        else if (n < 0 && errno != EAGAIN && errno != EINTR) fail_crash();
      }
      if (idx_err >= 0 && fds[idx_err].revents) {
        ssize_t n = ::read(ch.err.read.get(), buf, sizeof buf);
        if (n > 0) err.append(buf, static_cast<std::size_t>(n));
        else if (n == 0 || errno != EINTR) ch.err.read.reset();
      }
      if (fds[idx_out].revents) {
        ssize_t n = ::read(ch.out.read.get(), buf, sizeof buf);
        if (n > 0) {
          pending.append(buf, static_cast<std::size_t>(n));
          take();
        } else if (n == 0 || errno != EINTR) {
          fail_crash();
        }
      }
    }
    return got;
  }
};

SolverProcess::SolverProcess(const SolverConfig& cfg) : impl_(std::make_unique<Impl>()) {
  if (cfg.timeout_ms <= 0) throw Error("solver timeout must be positive");
  impl_->cfg = cfg;
  impl_->ch = spawn(cfg);
  ::fcntl(impl_->ch.in.write.get(), F_SETFL, O_NONBLOCK);
}

SolverProcess::~SolverProcess() = default;

void SolverProcess::send(const std::string& commands) { impl_->exchange(commands, 0); }

SExpr SolverProcess::ask(const std::string& command) {
  return std::move(impl_->exchange(command + "\n", 1).front());
}

std::vector<SExpr> SolverProcess::ask_n(const std::string& command, std::size_t n) {
  return impl_->exchange(command + "\n", n);
}

bool SolverProcess::alive() const noexcept { return !impl_->dead; }

Capabilities probe_solver(const SolverConfig& cfg) {
  static const char* kProbe =
      "(set-option :produce-unsat-cores true)\n"
      "(set-logic QF_LIRA)\n"
      "(declare-fun lexv_probe () Bool)\n"
      "(assert (! lexv_probe :named lexv_probe_a))\n"
      "(assert (! (not lexv_probe) :named lexv_probe_b))\n"
      "(check-sat)\n"
      "(get-unsat-core)\n"
      "(get-info :version)\n";
  RawRun run = run_solver(kProbe, cfg);
  Capabilities caps;
  std::vector<SExpr> items;
  try {
    items = parse_sexprs(run.out);
  } catch (const ProtocolError&) {
    return caps;
  }
  std::size_t i = 0;
  while (i < items.size() && items[i].is_atom("success")) ++i;
  if (i < items.size() && items[i].is_atom("unsat") && i + 1 < items.size()) {
    const SExpr& core = items[i + 1];
    bool a = false, b = false;
    if (core.is_list()) {
      for (const auto& n : core.items) {
        a = a || n.is_atom("lexv_probe_a");
        b = b || n.is_atom("lexv_probe_b");
      }
    }
    caps.cores = a && b;
  }
  for (const auto& it : items) {
    if (it.is_list() && it.items.size() == 2 && it.items[0].is_atom(":version"))
      caps.version = it.items[1].text;
  }
  return caps;
}

Solver Solver::connect(SolverConfig cfg) {
  Capabilities caps = probe_solver(cfg);
  return Solver(std::move(cfg), std::move(caps));
}

void Solver::require_cores() const {
  if (caps_ && !caps_->cores) throw CoresUnsupported();
}

}  // namespace lexv
