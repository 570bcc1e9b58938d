#include "reascirc/backend.hpp"

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "reascirc/error.hpp"
#include "reascirc/mixture.hpp"
#include "reascirc/text.hpp"

namespace reascirc {

using nlohmann::ordered_json;

bool ScriptedKey::operator<(const ScriptedKey& other) const {
  if (example_id != other.example_id) return example_id < other.example_id;
  if (task != other.task) return task < other.task;
  return passage_index.value_or(0) < other.passage_index.value_or(0);
}

namespace {

std::string key_to_string(const ScriptedKey& key) {
  std::string s = "(" + key.example_id + ", " + to_string(key.task);
  if (key.passage_index) s += ", p" + std::to_string(*key.passage_index);
  return s + ")";
}

}  // namespace

ScriptedBackend::ScriptedBackend(MissPolicy policy, std::string constant_text)
    : policy_(policy), constant_text_(std::move(constant_text)) {}

void ScriptedBackend::add(const ScriptedKey& key, std::string prompt,
                          std::string response) {
  entries_[key] = {std::move(prompt), std::move(response)};
}

GenResponse ScriptedBackend::generate(const GenRequest& request) {
  GenResponse response;
  response.backend_id = id();
  if (!request.task) {
    throw Error(ErrorKind::Contract,
                "scripted backend requires a keyed request (task unset)");
  }
  ScriptedKey key{request.example_id, *request.task, request.passage_index};
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    switch (policy_) {
      case MissPolicy::Fail:
        throw Error(ErrorKind::ScriptedMiss,
                    "no scripted answer for key " + key_to_string(key));
      case MissPolicy::EchoEmpty:
        response.text = "";
        return response;
      case MissPolicy::Constant:
        response.text = constant_text_;
        return response;
    }
  }
  if (it->second.prompt != request.prompt) {
    throw Error(ErrorKind::PromptDrift,
                "prompt for key " + key_to_string(key) +
                    " differs from the scripted one\n  expected: " +
                    it->second.prompt + "\n  got:      " + request.prompt);
  }
  response.text = it->second.response;
  return response;
}

std::unique_ptr<ScriptedBackend> scripted_from_annotations(
    const std::vector<AnnotatedExample>& pool, ContextMode mode,
    MissPolicy policy, std::string constant_text,
    const SentinelConfig& sentinels) {
  auto backend =
      std::make_unique<ScriptedBackend>(policy, std::move(constant_text));
  for (const AnnotatedExample& a : pool) {
    for (const TaskInstance& inst : expand_annotation(a, mode, sentinels)) {
      backend->add({inst.example_id, inst.task, inst.passage_index},
                   inst.input_prompt, inst.target);
    }
  }
  return backend;
}

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorKind::Config, "endpoint must be an http URL: " + endpoint);
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(const HttpBackendConfig& config)
      : config_(config), url_(parse_endpoint(config.endpoint)) {
    if (config.max_in_flight < 1)
      throw Error(ErrorKind::Config, "max_in_flight must be at least 1");
  }

  std::string id() const override { return "http:" + config_.endpoint; }

  GenResponse generate(const GenRequest& request) override {
    ordered_json body;
    body["prompt"] = request.prompt;
    body["max_new_tokens"] = request.max_new_tokens;
    body["stop"] = request.stop;
    const std::string payload = body.dump();

    InFlightSlot slot(*this);
    auto start = std::chrono::steady_clock::now();
    std::string failure;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(
            config_.backoff_base_ms * (1 << (attempt - 1))));
      }
      httplib::Client client(url_.base);
      client.set_connection_timeout(0, config_.timeout_ms * 1000LL);
      client.set_read_timeout(0, config_.timeout_ms * 1000LL);
      client.set_write_timeout(0, config_.timeout_ms * 1000LL);

      httplib::Result result =
          client.Post(url_.path, payload, "application/json");
      if (!result) {
        failure = "connection/timeout error: " +
                  httplib::to_string(result.error());
        continue;  // retryable
      }
      if (result->status >= 500) {
        failure = "server error: HTTP " + std::to_string(result->status);
        continue;  // retryable
      }
      if (result->status < 200 || result->status >= 300) {
        throw Error(ErrorKind::BackendRequest,
                    "HTTP " + std::to_string(result->status) + " from " +
                        config_.endpoint);
      }
      ordered_json parsed;
      try {
        parsed = ordered_json::parse(result->body);
      } catch (const nlohmann::json::parse_error&) {
        throw Error(ErrorKind::BackendProtocol,
                    "response body is not JSON: " + config_.endpoint);
      }
      if (!parsed.contains("text") || !parsed["text"].is_string())
        throw Error(ErrorKind::BackendProtocol,
                    "response lacks a \"text\" string: " + config_.endpoint);
      GenResponse response;
      response.text = parsed["text"].get<std::string>();
      response.backend_id = id();
      response.latency_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - start)
              .count();
      return response;
    }
    throw Error(ErrorKind::BackendUnavailable,
                "retries exhausted for " + config_.endpoint + " (" + failure +
                    ")");
  }

 private:
  // Bounds concurrent requests without C++20 semaphores so the class stays
  // friendly to older libstdc++ deployments of the shared library.
  class InFlightSlot {
   public:
    explicit InFlightSlot(HttpBackend& owner) : owner_(owner) {
      std::unique_lock lock(owner_.mutex_);
      owner_.cv_.wait(lock, [&] {
        return owner_.in_flight_ < owner_.config_.max_in_flight;
      });
      ++owner_.in_flight_;
    }
    ~InFlightSlot() {
      {
        std::lock_guard lock(owner_.mutex_);
        --owner_.in_flight_;
      }
      owner_.cv_.notify_one();
    }

   private:
    HttpBackend& owner_;
  };

  HttpBackendConfig config_;
  ParsedUrl url_;
  std::mutex mutex_;
  std::condition_variable cv_;
  int in_flight_ = 0;
};

}  // namespace

std::unique_ptr<Backend> make_http_backend(const HttpBackendConfig& config) {
  return std::make_unique<HttpBackend>(config);
}

GenResponse RecordingBackend::generate(const GenRequest& request) {
  if (!request.task)
    throw Error(ErrorKind::Contract,
                "recording backend requires a keyed request (task unset)");
  GenResponse response = inner_.generate(request);
  log_.push_back({{request.example_id, *request.task, request.passage_index},
                  request.prompt,
                  response.text});
  return response;
}

void RecordingBackend::save_log(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write log: " + path);
  for (const RecordedCall& call : log_) {
    ordered_json obj;
    obj["example_id"] = call.key.example_id;
    obj["task"] = to_string(call.key.task);
    if (call.key.passage_index)
      obj["passage_index"] = *call.key.passage_index;
    else
      obj["passage_index"] = nullptr;
    obj["prompt"] = call.prompt;
    obj["text"] = call.text;
    out << obj.dump() << '\n';
  }
}

std::vector<RecordedCall> load_generation_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open log: " + path);
  std::vector<RecordedCall> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::Parse, "malformed JSON in " + path + " at line " +
                                        std::to_string(line_no) + ": " +
                                        e.what());
    }
    RecordedCall call;
    call.key.example_id = obj.at("example_id").get<std::string>();
    auto task = task_from_string(obj.at("task").get<std::string>());
    if (!task)
      throw Error(ErrorKind::Schema, "unknown task in log at line " +
                                         std::to_string(line_no));
    call.key.task = *task;
    if (obj.contains("passage_index") && !obj["passage_index"].is_null())
      call.key.passage_index = obj["passage_index"].get<int>();
    call.prompt = obj.at("prompt").get<std::string>();
    call.text = obj.at("text").get<std::string>();
    out.push_back(std::move(call));
  }
  return out;
}

std::unique_ptr<ScriptedBackend> scripted_from_log(
    const std::vector<RecordedCall>& log, MissPolicy policy) {
  auto backend = std::make_unique<ScriptedBackend>(policy);
  for (const RecordedCall& call : log)
    backend->add(call.key, call.prompt, call.text);
  return backend;
}

}  // namespace reascirc
