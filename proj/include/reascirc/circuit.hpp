#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reascirc/backend.hpp"
#include "reascirc/dataset.hpp"
#include "reascirc/error.hpp"
#include "reascirc/prompts.hpp"
#include "reascirc/types.hpp"

namespace reascirc {

struct StepRecord {
  TaskId task = TaskId::T1;
  std::optional<int> passage_index;
  std::string prompt;
  std::string raw_generation;
  bool parse_ok = false;
  std::vector<std::string> parsed;
  std::vector<std::string> validator_flags;
};

struct GeneratedQuestion {
  QuestionType type;
  std::string text;
};

struct CircuitTrace {
  std::string input_id;
  std::vector<StepRecord> steps;
  ControlState controls;
  std::vector<GeneratedQuestion> questions;

  std::vector<TaskId> task_sequence() const;
  std::string to_json() const;
};

enum class ConfusedPolicy { Both, BridgeOnly, ComparisonOnly };
enum class ValidatorMode { Warn, Reject };

const char* to_string(ConfusedPolicy p);
const char* to_string(ValidatorMode m);
std::optional<ConfusedPolicy> confused_policy_from_string(std::string_view s);

struct RunConfig {
  ContextMode context_mode = ContextMode::Full;
  ConfusedPolicy confused_policy = ConfusedPolicy::Both;
  ValidatorMode validator_mode = ValidatorMode::Warn;
  int max_new_tokens = 128;
  std::map<TaskId, int> max_new_tokens_per_task;
  SentinelConfig sentinels;

  int tokens_for(TaskId t) const;
};

// Circuit abort: backend failure, generative parse failure or a validator
// rejection. Whatever ran before the abort is preserved.
class RunError : public Error {
 public:
  RunError(std::string message, CircuitTrace partial)
      : Error(ErrorKind::Run, std::move(message)),
        partial_(std::move(partial)) {}

  const CircuitTrace& partial_trace() const { return partial_; }

 private:
  CircuitTrace partial_;
};

struct StatementStep {
  TaskId task;
  int passage_index;
};

// Statement routing for the bridge branch. Requires all three controls set.
//   same=true            -> T6 on both passages
//   exactly one in-flag  -> T5 on the answer passage, T6 on the other
//   both in-flags        -> T5 on both
//   neither in-flag      -> T6 on both
std::vector<StatementStep> bridge_statement_plan(const ControlState& st);

// Post-hoc checks on a generative step's output. `context` carries the slot
// values the warning rules compare against (bridge, answer, s1, s2).
std::vector<std::string> validate_step(TaskId task,
                                       const std::vector<std::string>& parsed,
                                       const SlotMap& context);

// Imputed control value when T3/T4 output parses to neither vocabulary word.
// T3: answer-span containment in the passage context. T4: case-insensitive
// equality of answer and bridge.
bool control_fallback(TaskId task, const MQGInput& x, ContextMode mode,
                      int passage_index, const std::optional<std::string>& bridge);

CircuitTrace run_circuit(const std::string& input_id, const MQGInput& x,
                         Backend& backend, const RunConfig& cfg);
CircuitTrace run_circuit(const GoldExample& example, Backend& backend,
                         const RunConfig& cfg);

void write_trace(const CircuitTrace& trace, const std::string& path);

}  // namespace reascirc
