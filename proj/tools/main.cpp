// Command-line front end. Everything goes through the C API in reascirc.h;
// the JSON vendor header is only used to pretty-print returned reports.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "reascirc.h"

namespace {

// 0 success, 1 domain failure, 2 usage/IO. Stable contract.
int exit_code_for(int rc) {
  switch (rc) {
    case REASCIRC_OK:
      return 0;
    case REASCIRC_E_VALIDATION:
    case REASCIRC_E_CAPACITY:
    case REASCIRC_E_BACKEND:
    case REASCIRC_E_RUN:
      return 1;
    default:
      return 2;
  }
}

int finish(int rc) {
  if (rc != REASCIRC_OK) std::cerr << "error: " << reascirc_last_error() << "\n";
  return exit_code_for(rc);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  reascirc_string_free(s);
  return out;
}

struct ValidateArgs {
  std::string annotations;
};

int cmd_validate(const ValidateArgs& args) {
  char* report_raw = nullptr;
  int rc = reascirc_validate_file(args.annotations.c_str(), &report_raw);
  if (rc != REASCIRC_OK && rc != REASCIRC_E_VALIDATION) return finish(rc);

  auto report = nlohmann::json::parse(take(report_raw));
  for (const auto& item : report["items"]) {
    std::cout << item["severity"].get<std::string>() << " "
              << item["record_id"].get<std::string>() << ": "
              << item["rule"].get<std::string>() << " ("
              << item["message"].get<std::string>() << ")\n";
  }
  size_t records = report["records"].get<size_t>();
  size_t errors = report["errors"].get<size_t>();
  size_t warnings = report["warnings"].get<size_t>();
  if (errors == 0) {
    std::cout << records << " records OK";
    if (warnings) std::cout << " (" << warnings << " warning(s))";
    std::cout << "\n";
    return 0;
  }
  std::cout << errors << " error(s) across " << records << " record(s)\n";
  return 1;
}

struct MixtureArgs {
  std::string annotations;
  int shots = 8;
  uint64_t seed = 0;
  std::string context = "full";
  bool baseline = false;
  std::string out;
};

int cmd_mixture(const MixtureArgs& args) {
  reascirc_pool* pool = nullptr;
  int rc = reascirc_pool_load(args.annotations.c_str(), &pool);
  if (rc != REASCIRC_OK) return finish(rc);

  std::cerr << "seed: " << args.seed << "\n";
  char* stats_raw = nullptr;
  rc = reascirc_mixture_build(pool, args.shots, args.seed,
                              args.context.c_str(), args.baseline ? 1 : 0,
                              args.out.c_str(), &stats_raw);
  reascirc_pool_free(pool);
  if (rc != REASCIRC_OK) return finish(rc);
  std::cout << take(stats_raw) << "\n";
  std::cerr << "wrote " << args.out << " and " << args.out << ".meta.json\n";
  return 0;
}

struct RunArgs {
  std::string dataset;
  std::string backend = "scripted";
  std::string endpoint;
  std::string annotations;
  std::string context = "full";
  std::string confused_policy = "both";
  std::string validator_mode = "warn";
  std::string traces_dir;
  std::string out;
  int jobs = 4;
  int max_new_tokens = 128;
  int timeout_ms = 30000;
  int retries = 2;
};

int cmd_run(const RunArgs& args) {
  reascirc_pool* pool = nullptr;
  reascirc_backend* backend = nullptr;
  int rc = REASCIRC_OK;
  if (args.backend == "scripted") {
    if (args.annotations.empty()) {
      std::cerr << "error: --backend scripted requires --annotations\n";
      return 2;
    }
    rc = reascirc_pool_load(args.annotations.c_str(), &pool);
    if (rc != REASCIRC_OK) return finish(rc);
    rc = reascirc_backend_scripted(pool, args.context.c_str(), "fail", nullptr,
                                   &backend);
  } else if (args.backend == "http") {
    if (args.endpoint.empty()) {
      std::cerr << "error: --backend http requires --endpoint\n";
      return 2;
    }
    rc = reascirc_backend_http(args.endpoint.c_str(), args.timeout_ms,
                               args.retries, &backend);
  } else {
    std::cerr << "error: unknown backend \"" << args.backend << "\"\n";
    return 2;
  }
  if (rc != REASCIRC_OK) {
    reascirc_pool_free(pool);
    return finish(rc);
  }

  nlohmann::json options;
  options["context_mode"] = args.context;
  options["confused_policy"] = args.confused_policy;
  options["validator_mode"] = args.validator_mode;
  options["max_new_tokens"] = args.max_new_tokens;
  options["jobs"] = args.jobs;

  char* summary_raw = nullptr;
  rc = reascirc_run_dataset(
      args.dataset.c_str(), backend, options.dump().c_str(),
      args.traces_dir.empty() ? nullptr : args.traces_dir.c_str(),
      args.out.empty() ? nullptr : args.out.c_str(), &summary_raw);
  reascirc_backend_free(backend);
  reascirc_pool_free(pool);

  std::string summary = take(summary_raw);
  if (!summary.empty()) std::cout << summary << "\n";
  if (rc != REASCIRC_OK && rc != REASCIRC_E_RUN) return finish(rc);
  if (rc == REASCIRC_E_RUN)
    std::cerr << "error: " << reascirc_last_error() << "\n";
  return exit_code_for(rc);
}

struct EvalArgs {
  std::string pred;
  std::string out;
};

int cmd_eval(const EvalArgs& args) {
  char* report_raw = nullptr;
  int rc = reascirc_eval_predictions(args.pred.c_str(),
                                     args.out.empty() ? nullptr : args.out.c_str(),
                                     &report_raw);
  if (rc != REASCIRC_OK) return finish(rc);
  std::cout << take(report_raw) << "\n";
  return 0;
}

struct SheetArgs {
  std::string pred;
  std::string dataset;
  size_t n = 150;
  uint64_t seed = 0;
  std::string out;
};

int cmd_sheet(const SheetArgs& args) {
  std::cerr << "seed: " << args.seed << "\n";
  int rc = reascirc_sheet_export(
      args.pred.c_str(), args.dataset.empty() ? nullptr : args.dataset.c_str(),
      args.n, args.seed, args.out.c_str());
  if (rc != REASCIRC_OK) return finish(rc);
  std::cerr << "wrote " << args.n << " rows to " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-shot multi-hop question generation via reasoning circuits"};
  app.set_version_flag("--version", reascirc_version());
  app.set_config("--config", "", "key=value config file")
      ->envname("REASONING_CIRCUITS_CONFIG");
  app.allow_config_extras(false);
  app.require_subcommand(1);

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Check an annotation file");
  validate->add_option("annotations", validate_args.annotations,
                       "annotation JSONL file")
      ->required();

  MixtureArgs mixture_args;
  auto* mixture =
      app.add_subcommand("mixture", "Build a k-shot training mixture");
  mixture->add_option("--annotations", mixture_args.annotations,
                      "annotation JSONL file")
      ->required();
  mixture->add_option("--shots", mixture_args.shots, "training examples (k)")
      ->required();
  mixture->add_option("--seed", mixture_args.seed, "sampling seed");
  mixture->add_option("--context", mixture_args.context,
                      "context mode: full|supporting");
  mixture->add_flag("--baseline", mixture_args.baseline,
                    "also emit baseline records");
  mixture->add_option("--out", mixture_args.out, "output JSONL path")
      ->required();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the circuit over a dataset");
  run->add_option("--dataset", run_args.dataset, "dataset JSON file")
      ->required();
  run->add_option("--backend", run_args.backend, "scripted|http");
  run->add_option("--endpoint", run_args.endpoint, "http backend URL");
  run->add_option("--annotations", run_args.annotations,
                  "annotation JSONL (scripted backend)");
  run->add_option("--context", run_args.context, "context mode: full|supporting");
  run->add_option("--confused-policy", run_args.confused_policy,
                  "both|bridge_only|comparison_only");
  run->add_option("--validator", run_args.validator_mode, "warn|reject");
  run->add_option("--traces", run_args.traces_dir, "trace output directory");
  run->add_option("--out", run_args.out, "predictions JSONL path");
  run->add_option("--jobs", run_args.jobs, "worker pool size");
  run->add_option("--max-new-tokens", run_args.max_new_tokens,
                  "generation budget per step");
  run->add_option("--timeout-ms", run_args.timeout_ms, "http timeout");
  run->add_option("--retries", run_args.retries, "http retries");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score predictions against references");
  eval->add_option("--pred", eval_args.pred, "predictions JSONL")->required();
  eval->add_option("--out", eval_args.out, "metric report JSON path");

  SheetArgs sheet_args;
  auto* sheet =
      app.add_subcommand("sheet", "Export a human-evaluation CSV sample");
  sheet->add_option("--pred", sheet_args.pred, "predictions JSONL")->required();
  sheet->add_option("--dataset", sheet_args.dataset,
                    "dataset JSON for passage columns");
  sheet->add_option("-n", sheet_args.n, "rows to sample");
  sheet->add_option("--seed", sheet_args.seed, "sampling seed");
  sheet->add_option("--out", sheet_args.out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (validate->parsed()) return cmd_validate(validate_args);
  if (mixture->parsed()) return cmd_mixture(mixture_args);
  if (run->parsed()) return cmd_run(run_args);
  if (eval->parsed()) return cmd_eval(eval_args);
  if (sheet->parsed()) return cmd_sheet(sheet_args);
  return 2;
}
