#pragma once

#include <string>
#include <vector>

#include "reascirc/backend.hpp"
#include "reascirc/circuit.hpp"

namespace reascirc {

struct RunOptions {
  RunConfig config;
  int jobs = 4;
  std::string traces_dir;        // empty: no trace files
  std::string predictions_path;  // empty: no predictions file
};

struct RunFailure {
  std::string id;
  std::string error;
};

struct RunSummary {
  size_t total = 0;
  size_t succeeded = 0;
  std::vector<RunFailure> failures;

  std::string to_json() const;
};

// Runs the circuit over every example with a bounded worker pool. Outputs
// (trace files, predictions JSONL) are ordered by example id regardless of
// scheduling. Failed examples keep their partial trace (with an "error"
// field) and are listed in the summary.
RunSummary run_dataset(const std::vector<GoldExample>& examples,
                       Backend& backend, const RunOptions& options);

}  // namespace reascirc
