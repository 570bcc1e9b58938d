#include "reascirc.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "reascirc/backend.hpp"
#include "reascirc/circuit.hpp"
#include "reascirc/dataset.hpp"
#include "reascirc/error.hpp"
#include "reascirc/metrics.hpp"
#include "reascirc/mixture.hpp"
#include "reascirc/runner.hpp"
#include "reascirc/version.hpp"

using nlohmann::ordered_json;
namespace rc = reascirc;

struct reascirc_pool {
  std::vector<rc::AnnotatedExample> records;
};

struct reascirc_backend {
  std::unique_ptr<rc::Backend> backend;
};

namespace {

thread_local std::string g_last_error;

int code_for(rc::ErrorKind kind) {
  using rc::ErrorKind;
  switch (kind) {
    case ErrorKind::Io: return REASCIRC_E_IO;
    case ErrorKind::Parse: return REASCIRC_E_PARSE;
    case ErrorKind::Schema: return REASCIRC_E_SCHEMA;
    case ErrorKind::Validation: return REASCIRC_E_VALIDATION;
    case ErrorKind::Config: return REASCIRC_E_CONFIG;
    case ErrorKind::Contract: return REASCIRC_E_CONTRACT;
    case ErrorKind::Capacity: return REASCIRC_E_CAPACITY;
    case ErrorKind::ScriptedMiss:
    case ErrorKind::PromptDrift:
    case ErrorKind::BackendUnavailable:
    case ErrorKind::BackendRequest:
    case ErrorKind::BackendProtocol: return REASCIRC_E_BACKEND;
    case ErrorKind::Run: return REASCIRC_E_RUN;
  }
  return REASCIRC_E_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const rc::Error& e) {
    g_last_error = e.what();
    return code_for(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return REASCIRC_E_INTERNAL;
  }
}

int invalid_arg(const char* message) {
  g_last_error = message;
  return REASCIRC_E_INVALID_ARG;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_out(char** out, const std::string& value) {
  if (out) *out = dup_string(value);
}

rc::ContextMode parse_context_mode(const char* mode) {
  if (!mode) return rc::ContextMode::Full;
  auto m = rc::context_mode_from_string(mode);
  if (!m)
    throw rc::Error(rc::ErrorKind::Config,
                    std::string("unknown context mode: ") + mode);
  return *m;
}

ordered_json report_to_json(const rc::ValidationReport& report,
                            size_t records) {
  ordered_json obj;
  obj["records"] = records;
  obj["errors"] = report.error_count();
  obj["warnings"] = report.items.size() - report.error_count();
  ordered_json items = ordered_json::array();
  for (const rc::Violation& v : report.items) {
    items.push_back(
        {{"record_id", v.record_id},
         {"rule", v.rule},
         {"message", v.message},
         {"severity", v.severity == rc::Severity::Error ? "error" : "warning"}});
  }
  obj["items"] = std::move(items);
  return obj;
}

}  // namespace

extern "C" {

const char* reascirc_version(void) { return REASCIRC_VERSION_STRING; }

const char* reascirc_last_error(void) { return g_last_error.c_str(); }

void reascirc_string_free(char* s) { std::free(s); }

int reascirc_pool_load(const char* path, reascirc_pool** out) {
  if (!path || !out) return invalid_arg("path and out must be non-null");
  return guarded([&] {
    auto pool = std::make_unique<reascirc_pool>();
    pool->records = rc::parse_annotation_file(path);
    *out = pool.release();
    return REASCIRC_OK;
  });
}

void reascirc_pool_free(reascirc_pool* pool) { delete pool; }

size_t reascirc_pool_size(const reascirc_pool* pool) {
  return pool ? pool->records.size() : 0;
}

int reascirc_validate_file(const char* path, char** report_json) {
  if (!path) return invalid_arg("path must be non-null");
  return guarded([&] {
    rc::AnnotationLoad load = rc::load_annotations(path);
    set_out(report_json,
            report_to_json(load.report, load.records.size()).dump(2));
    if (load.report.has_errors()) {
      g_last_error = std::to_string(load.report.error_count()) +
                     " validation error(s) in " + std::string(path);
      return REASCIRC_E_VALIDATION;
    }
    return REASCIRC_OK;
  });
}

int reascirc_mixture_build(const reascirc_pool* pool, int shots, uint64_t seed,
                           const char* context_mode, int include_baseline,
                           const char* out_path, char** stats_json) {
  if (!pool || !out_path) return invalid_arg("pool and out_path must be non-null");
  return guarded([&] {
    rc::MixtureSpec spec;
    spec.k_train = shots;
    spec.seed = seed;
    spec.context_mode = parse_context_mode(context_mode);
    spec.include_baseline = include_baseline != 0;

    rc::KShotSample sample = rc::sample_kshot(pool->records, spec);
    std::vector<rc::TaskInstance> instances;
    for (const rc::AnnotatedExample& a : sample.train) {
      auto expanded = rc::expand_annotation(a, spec.context_mode);
      instances.insert(instances.end(),
                       std::make_move_iterator(expanded.begin()),
                       std::make_move_iterator(expanded.end()));
      if (spec.include_baseline)
        instances.push_back(rc::baseline_instance(a, spec.context_mode));
    }
    size_t written = rc::emit_training_file(instances, out_path);
    rc::write_metadata_sidecar(spec, sample,
                               std::string(out_path) + ".meta.json");

    ordered_json stats;
    for (const auto& [task, count] : rc::mixture_stats(instances))
      stats[rc::to_string(task)] = count;
    stats["total"] = written;
    stats["train_examples"] = sample.train.size();
    stats["val_examples"] = sample.val.size();
    set_out(stats_json, stats.dump(2));
    return REASCIRC_OK;
  });
}

int reascirc_backend_scripted(const reascirc_pool* pool,
                              const char* context_mode, const char* miss_policy,
                              const char* constant_text,
                              reascirc_backend** out) {
  if (!pool || !out) return invalid_arg("pool and out must be non-null");
  return guarded([&] {
    rc::MissPolicy policy = rc::MissPolicy::Fail;
    std::string constant;
    if (miss_policy) {
      std::string p = miss_policy;
      if (p == "fail") {
        policy = rc::MissPolicy::Fail;
      } else if (p == "echo-empty") {
        policy = rc::MissPolicy::EchoEmpty;
      } else if (p == "constant") {
        policy = rc::MissPolicy::Constant;
        if (!constant_text)
          throw rc::Error(rc::ErrorKind::Config,
                          "miss policy \"constant\" needs constant_text");
        constant = constant_text;
      } else {
        throw rc::Error(rc::ErrorKind::Config, "unknown miss policy: " + p);
      }
    }
    auto handle = std::make_unique<reascirc_backend>();
    handle->backend = rc::scripted_from_annotations(
        pool->records, parse_context_mode(context_mode), policy, constant);
    *out = handle.release();
    return REASCIRC_OK;
  });
}

int reascirc_backend_http(const char* endpoint, int timeout_ms, int retries,
                          reascirc_backend** out) {
  if (!endpoint || !out) return invalid_arg("endpoint and out must be non-null");
  return guarded([&] {
    rc::HttpBackendConfig config;
    config.endpoint = endpoint;
    if (timeout_ms > 0) config.timeout_ms = timeout_ms;
    if (retries >= 0) config.retries = retries;
    auto handle = std::make_unique<reascirc_backend>();
    handle->backend = rc::make_http_backend(config);
    *out = handle.release();
    return REASCIRC_OK;
  });
}

void reascirc_backend_free(reascirc_backend* backend) { delete backend; }

int reascirc_run_dataset(const char* dataset_path, reascirc_backend* backend,
                         const char* run_options_json, const char* traces_dir,
                         const char* predictions_path, char** summary_json) {
  if (!dataset_path || !backend)
    return invalid_arg("dataset_path and backend must be non-null");
  return guarded([&] {
    rc::RunOptions options;
    if (run_options_json && *run_options_json) {
      ordered_json opts;
      try {
        opts = ordered_json::parse(run_options_json);
      } catch (const nlohmann::json::parse_error& e) {
        throw rc::Error(rc::ErrorKind::Config,
                        std::string("bad run_options_json: ") + e.what());
      }
      if (opts.contains("context_mode"))
        options.config.context_mode =
            parse_context_mode(opts["context_mode"].get<std::string>().c_str());
      if (opts.contains("confused_policy")) {
        auto p = rc::confused_policy_from_string(
            opts["confused_policy"].get<std::string>());
        if (!p)
          throw rc::Error(rc::ErrorKind::Config, "unknown confused_policy");
        options.config.confused_policy = *p;
      }
      if (opts.contains("validator_mode")) {
        std::string m = opts["validator_mode"].get<std::string>();
        if (m == "warn") options.config.validator_mode = rc::ValidatorMode::Warn;
        else if (m == "reject")
          options.config.validator_mode = rc::ValidatorMode::Reject;
        else
          throw rc::Error(rc::ErrorKind::Config, "unknown validator_mode");
      }
      if (opts.contains("max_new_tokens"))
        options.config.max_new_tokens = opts["max_new_tokens"].get<int>();
      if (opts.contains("jobs")) options.jobs = opts["jobs"].get<int>();
    }
    if (traces_dir) options.traces_dir = traces_dir;
    if (predictions_path) options.predictions_path = predictions_path;

    std::vector<rc::GoldExample> examples = rc::parse_dataset_file(dataset_path);
    rc::RunSummary summary =
        rc::run_dataset(examples, *backend->backend, options);
    set_out(summary_json, summary.to_json());
    if (!summary.failures.empty()) {
      g_last_error = std::to_string(summary.failures.size()) + " of " +
                     std::to_string(summary.total) + " examples failed";
      return REASCIRC_E_RUN;
    }
    return REASCIRC_OK;
  });
}

int reascirc_eval_predictions(const char* predictions_path,
                              const char* report_path, char** report_json) {
  if (!predictions_path) return invalid_arg("predictions_path must be non-null");
  return guarded([&] {
    rc::PredictionsLoad load = rc::read_predictions(predictions_path);
    rc::MetricReport report = rc::evaluate_run(load.pairs);
    if (report_path) rc::write_report(report, report_path);
    set_out(report_json, report.to_json());
    return REASCIRC_OK;
  });
}

int reascirc_sheet_export(const char* predictions_path,
                          const char* dataset_path, size_t n, uint64_t seed,
                          const char* out_path) {
  if (!predictions_path || !out_path)
    return invalid_arg("predictions_path and out_path must be non-null");
  return guarded([&] {
    auto questions = rc::read_prediction_questions(predictions_path);
    std::map<std::string, const rc::GoldExample*> by_id;
    std::vector<rc::GoldExample> dataset;
    if (dataset_path) {
      dataset = rc::parse_dataset_file(dataset_path);
      for (const rc::GoldExample& ex : dataset) by_id[ex.id] = &ex;
    }
    std::vector<rc::SheetRow> rows;
    rows.reserve(questions.size());
    for (const auto& [id, question] : questions) {
      rc::SheetRow row;
      row.id = id;
      row.question = question;
      auto it = by_id.find(id);
      if (it != by_id.end()) {
        row.p1 = rc::select_context(it->second->input.p1, rc::ContextMode::Full);
        row.p2 = rc::select_context(it->second->input.p2, rc::ContextMode::Full);
        row.answer = it->second->input.answer;
      }
      rows.push_back(std::move(row));
    }
    rc::export_human_eval_sheet(rows, n, seed, out_path);
    return REASCIRC_OK;
  });
}

}  // extern "C"
