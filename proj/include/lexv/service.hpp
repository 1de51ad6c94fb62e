#pragma once

#include "lexv/llm.hpp"
#include "lexv/solver.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lexv {

struct ServiceConfig {
  std::filesystem::path store_root = "store";
  SolverConfig solver;
  /// Allowed CORS origins; empty allows any origin.
  std::vector<std::string> cors_allowlist;
  std::optional<std::filesystem::path> corpus;  // JSON Lines, loaded at start
  std::string llm = "mock";                     // "mock" or "live"
  HttpPortConfig llm_http;
  std::optional<std::filesystem::path> static_dir;  // served at /
};

/// HTTP front end over the store, the verification engine, retrieval and the
/// LLM gateway. Routes and payloads are listed by GET /schema.
class Service {
 public:
  explicit Service(ServiceConfig cfg);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or throws.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "host:port" from `--bind`, else $LEXV_BIND, else 127.0.0.1:8080.
std::pair<std::string, int> resolve_bind(const std::optional<std::string>& cli);

}  // namespace lexv
