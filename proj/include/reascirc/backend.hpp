#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reascirc/dataset.hpp"
#include "reascirc/prompts.hpp"
#include "reascirc/types.hpp"

namespace reascirc {

struct GenRequest {
  std::string prompt;
  int max_new_tokens = 0;
  std::vector<std::string> stop;

  // Routing metadata for keyed backends; never sent over the wire.
  std::string example_id;
  std::optional<TaskId> task;
  std::optional<int> passage_index;
};

struct GenResponse {
  std::string text;
  double latency_ms = 0;
  std::string backend_id;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenResponse generate(const GenRequest& request) = 0;
  virtual std::string id() const = 0;
};

enum class MissPolicy { Fail, EchoEmpty, Constant };

struct ScriptedKey {
  std::string example_id;
  TaskId task = TaskId::T1;
  std::optional<int> passage_index;

  bool operator<(const ScriptedKey& other) const;
};

// Pure lookup backend. Keyed by (example_id, task, passage_index); the stored
// prompt acts as a drift check — a key hit whose prompt differs from the
// request is a hard error, not a silent match.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(MissPolicy policy = MissPolicy::Fail,
                           std::string constant_text = {});

  void add(const ScriptedKey& key, std::string prompt, std::string response);

  GenResponse generate(const GenRequest& request) override;
  std::string id() const override { return "scripted"; }
  size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string prompt;
    std::string response;
  };
  std::map<ScriptedKey, Entry> entries_;
  MissPolicy policy_;
  std::string constant_text_;
};

// Builds the oracle backend: every task instance the expansion of `pool`
// would produce becomes one scripted answer.
std::unique_ptr<ScriptedBackend> scripted_from_annotations(
    const std::vector<AnnotatedExample>& pool,
    ContextMode mode = ContextMode::Full,
    MissPolicy policy = MissPolicy::Fail, std::string constant_text = {},
    const SentinelConfig& sentinels = {});

struct HttpBackendConfig {
  std::string endpoint;          // e.g. http://host:port/generate
  int timeout_ms = 30000;
  int retries = 2;               // on timeout/connection errors and 5xx
  int backoff_base_ms = 250;     // doubled per attempt
  int max_in_flight = 4;
};

// POST {endpoint} with {"prompt","max_new_tokens","stop"}, expects {"text"}.
std::unique_ptr<Backend> make_http_backend(const HttpBackendConfig& config);

struct RecordedCall {
  ScriptedKey key;
  std::string prompt;
  std::string text;
};

// Pass-through wrapper that logs every call so a run can be replayed through
// a fresh ScriptedBackend.
class RecordingBackend : public Backend {
 public:
  explicit RecordingBackend(Backend& inner) : inner_(inner) {}

  GenResponse generate(const GenRequest& request) override;
  std::string id() const override { return "recording(" + inner_.id() + ")"; }

  const std::vector<RecordedCall>& log() const { return log_; }
  void save_log(const std::string& path) const;

 private:
  Backend& inner_;
  std::vector<RecordedCall> log_;
};

std::vector<RecordedCall> load_generation_log(const std::string& path);
std::unique_ptr<ScriptedBackend> scripted_from_log(
    const std::vector<RecordedCall>& log, MissPolicy policy = MissPolicy::Fail);

}  // namespace reascirc
