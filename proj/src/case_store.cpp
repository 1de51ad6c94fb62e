#include "lexv/case_store.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace lexv {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

void fsync_path(const fs::path& p, int flags) {
  int fd = ::open(p.c_str(), flags);
  if (fd < 0) throw Error("cannot open " + p.string() + " for sync");
  ::fsync(fd);
  ::close(fd);
}

void write_file_atomic(const fs::path& p, const std::string& content) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw Error("cannot write " + tmp.string());
    std::size_t off = 0;
    while (off < content.size()) {
      ssize_t n = ::write(fd, content.data() + off, content.size() - off);
      if (n < 0) {
        ::close(fd);
        throw Error("write failed: " + tmp.string());
      }
      off += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
  }
  fs::rename(tmp, p);
  fsync_path(p.parent_path(), O_RDONLY | O_DIRECTORY);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NotFound("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

HistoryEntry entry_from_json(const json& j) {
  HistoryEntry e;
  e.version = j.at("version").get<long>();
  e.timestamp = j.value("timestamp", "");
  e.actor = j.value("actor", "");
  e.operation = j.value("operation", "");
  e.diff = j.value("diff", json::array());
  e.result = j.value("result", json(nullptr));
  return e;
}

/// Complete, well-formed log lines and the byte length they span.
std::pair<std::vector<HistoryEntry>, std::size_t> read_log(const fs::path& p) {
  std::vector<HistoryEntry> out;
  if (!fs::exists(p)) return {out, 0};
  const std::string text = read_file(p);
  std::size_t pos = 0, good = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail
    auto j = json::parse(text.substr(pos, nl - pos), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("version")) break;
    HistoryEntry e = entry_from_json(j);
    if (e.version != static_cast<long>(out.size()) + 1) break;
    out.push_back(std::move(e));
    pos = nl + 1;
    good = pos;
  }
  return {out, good};
}

bool valid_case_id(const std::string& id) {
  if (id.empty() || id.size() > 200 || id == "." || id == "..") return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
  return true;
}

}  // namespace

json to_json(const HistoryEntry& e) {
  json j = {{"version", e.version},
            {"timestamp", e.timestamp},
            {"actor", e.actor},
            {"operation", e.operation},
            {"diff", e.diff}};
  if (!e.result.is_null()) j["result"] = e.result;
  return j;
}

CaseStore::CaseStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path CaseStore::case_dir(const std::string& case_id) const {
  if (!valid_case_id(case_id)) throw Error("case id '" + case_id + "' is not usable as a directory name");
  return root_ / case_id;
}

CaseRecord CaseStore::load(const std::string& case_id) const {
  const fs::path dir = case_dir(case_id);
  auto [history, _] = read_log(dir / "log.jsonl");
  if (history.empty()) throw NotFound("case not found: " + case_id);
  CaseRecord r;
  r.case_id = case_id;
  r.version = history.back().version;
  r.bundle = bundle_from_json(json::parse(read_file(dir / ("bundle.v" + std::to_string(r.version) + ".json"))));
  for (const auto& e : history)
    if (e.operation.rfind("record:", 0) == 0) r.latest[e.operation.substr(7)] = e.result;
  r.history = std::move(history);
  return r;
}

void CaseStore::append(const std::string& case_id, const HistoryEntry& e, const json& doc) {
  const fs::path dir = case_dir(case_id);
  fs::create_directories(dir);
  write_file_atomic(dir / ("bundle.v" + std::to_string(e.version) + ".json"), doc.dump(2) + "\n");

  const fs::path log = dir / "log.jsonl";
  auto [_, good] = read_log(log);
  int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot open " + log.string());
  if (::ftruncate(fd, static_cast<off_t>(good)) != 0 || ::lseek(fd, static_cast<off_t>(good), SEEK_SET) < 0) {
    ::close(fd);
    throw Error("cannot position " + log.string());
  }
  const std::string line = to_json(e).dump() + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = ::write(fd, line.data() + off, line.size() - off);
    if (n < 0) {
      ::close(fd);
      throw Error("append failed: " + log.string());
    }
    off += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  fsync_path(dir, O_RDONLY | O_DIRECTORY);
}

CaseRecord CaseStore::put_case(const ConstraintBundle& b, long expected_version, const std::string& actor) {
  std::lock_guard lock(mu_);
  const fs::path dir = case_dir(b.case_id);
  auto [history, _] = read_log(dir / "log.jsonl");
  const long current = history.empty() ? 0 : history.back().version;
  if (current != expected_version) throw VersionConflict(expected_version, current);

  const json before =
      current == 0 ? json::object()
                   : json::parse(read_file(dir / ("bundle.v" + std::to_string(current) + ".json")));
  const json after = bundle_to_json(b);
  HistoryEntry e{current + 1, utc_now(), actor, "put", json::diff(before, after), nullptr};
  append(b.case_id, e, after);
  return load(b.case_id);
}

CaseRecord CaseStore::get_case(const std::string& case_id) const {
  std::lock_guard lock(mu_);
  return load(case_id);
}

std::vector<CaseRecord> CaseStore::list_cases(const CaseFilter& filter) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_))
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());
  std::vector<CaseRecord> out;
  for (const auto& id : ids) {
    if (id.rfind(filter.id_prefix, 0) != 0 || !valid_case_id(id)) continue;
    try {
      CaseRecord r = load(id);
      bool ok = true;
      for (const auto& [k, v] : filter.meta) {
        auto it = r.bundle.meta.find(k);
        ok = ok && it != r.bundle.meta.end() && it->second == v;
      }
      if (ok) out.push_back(std::move(r));
    } catch (const NotFound&) {
      // directory without an acknowledged version
    }
  }
  return out;
}

long CaseStore::record_result(const std::string& case_id, const std::string& kind, const json& result,
                              const std::string& actor) {
  std::lock_guard lock(mu_);
  CaseRecord r = load(case_id);
  HistoryEntry e{r.version + 1, utc_now(), actor, "record:" + kind, json::array(), result};
  append(case_id, e, bundle_to_json(r.bundle));
  return e.version;
}

json CaseStore::bundle_document(const std::string& case_id, long version) const {
  std::lock_guard lock(mu_);
  auto [history, _] = read_log(case_dir(case_id) / "log.jsonl");
  if (version < 1 || version > static_cast<long>(history.size()))
    throw NotFound("case " + case_id + " has no version " + std::to_string(version));
  return json::parse(read_file(case_dir(case_id) / ("bundle.v" + std::to_string(version) + ".json")));
}

json CaseStore::replay(const std::string& case_id, long version) const {
  std::lock_guard lock(mu_);
  auto [history, _] = read_log(case_dir(case_id) / "log.jsonl");
  if (version < 1 || version > static_cast<long>(history.size()))
    throw NotFound("case " + case_id + " has no version " + std::to_string(version));
  json doc = json::object();
  for (long v = 0; v < version; ++v) doc = doc.patch(history[v].diff);
  return doc;
}

}  // namespace lexv
