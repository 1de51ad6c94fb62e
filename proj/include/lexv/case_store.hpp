#pragma once

#include "lexv/bundle.hpp"
#include "lexv/json.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace lexv {

// On-disk layout, one directory per case:
//   <root>/<case_id>/bundle.v<N>.json   canonical bundle after mutation N
//   <root>/<case_id>/log.jsonl          one entry per mutation, in order
// A log line is written (and fsynced) after its bundle file; a mutation is
// acknowledged only once its log line is durable. A torn trailing line is
// ignored on open and cut off by the next append.

struct HistoryEntry {
  long version = 0;
  std::string timestamp;  // UTC, ISO 8601
  std::string actor;
  std::string operation;  // "put" or "record:<kind>"
  json diff;              // RFC 6902 patch from the previous bundle document
  json result;            // recorded result, null for puts
};

json to_json(const HistoryEntry& e);

struct CaseRecord {
  std::string case_id;
  ConstraintBundle bundle;
  long version = 0;
  std::vector<HistoryEntry> history;
  std::map<std::string, json> latest;  // result kind -> most recent result
};

struct CaseFilter {
  std::string id_prefix;
  std::map<std::string, std::string> meta;  // bundle meta entries that must match
};

class CaseStore {
 public:
  explicit CaseStore(std::filesystem::path root);

  /// `expected_version` is 0 for a new case. Throws VersionConflict.
  CaseRecord put_case(const ConstraintBundle& b, long expected_version, const std::string& actor = "api");
  /// Throws NotFound.
  CaseRecord get_case(const std::string& case_id) const;
  std::vector<CaseRecord> list_cases(const CaseFilter& filter = {}) const;

  /// Appends a result ("verdict", "illegal_terms", "correction", ...) and
  /// bumps the version. Throws NotFound.
  long record_result(const std::string& case_id, const std::string& kind, const json& result,
                     const std::string& actor = "api");

  /// Bundle document as stored for `version`.
  json bundle_document(const std::string& case_id, long version) const;
  /// Bundle document rebuilt by applying the log's diffs from an empty object.
  json replay(const std::string& case_id, long version) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path case_dir(const std::string& case_id) const;
  CaseRecord load(const std::string& case_id) const;
  void append(const std::string& case_id, const HistoryEntry& e, const json& doc);

  std::filesystem::path root_;
  mutable std::mutex mu_;
};

}  // namespace lexv
