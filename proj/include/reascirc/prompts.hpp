#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reascirc {

enum class TaskId {
  T1, T2, T3, T4, T5, T6, T7, T8, T9, T10, T11, T12, T13,
  Baseline,
};

const char* to_string(TaskId t);
std::optional<TaskId> task_from_string(std::string_view s);
bool is_control_task(TaskId t);

struct SentinelConfig {
  std::string sentinel_0 = "<extra_id_0>";
  std::string sentinel_1 = "<extra_id_1>";

  // Distinct, non-empty, neither a substring of the other.
  void check() const;
};

using SlotMap = std::map<std::string, std::string>;

// Canonical slot names shared by templates, the circuit engine and the
// mixture builder.
namespace slot {
inline constexpr const char* p1 = "p1";
inline constexpr const char* p2 = "p2";
inline constexpr const char* answer = "answer";
inline constexpr const char* passage = "passage";
inline constexpr const char* bridge = "bridge";
inline constexpr const char* s1 = "s1";
inline constexpr const char* s2 = "s2";
inline constexpr const char* combined = "combined";
inline constexpr const char* combined_minus_bridge = "combined_minus_bridge";
inline constexpr const char* combined_minus_bridge_answer =
    "combined_minus_bridge_answer";
}  // namespace slot

// Required input slot names, in template order.
const std::vector<std::string>& input_slots(TaskId t);

// Number of sentinel-delimited output values (1 or 2).
int output_arity(TaskId t);

// Renders the task's input prompt. Slots must match input_slots(t) exactly;
// slot values must not contain either sentinel string.
std::string render_input(TaskId t, const SlotMap& slots,
                         const SentinelConfig& s = {});

// "<s0> v0" or "<s0> v0 <s1> v1".
std::string render_target(TaskId t, const std::vector<std::string>& outputs,
                          const SentinelConfig& s = {});

struct ParsedOutput {
  bool ok = false;
  std::vector<std::string> values;  // trimmed, one per output slot
  std::string raw;                  // kept for trace logging on failure
};

// Inverse of render_target: splits on the sentinel strings in order. Text
// beyond the last expected value (stray sentinels and their tails) is
// discarded.
ParsedOutput parse_output(TaskId t, const std::string& raw,
                          const SentinelConfig& s = {});

enum class ControlValue { Bridge, Comparison, Confused, True, False, Fallback };

// T1: "bridge"/"comparison"/Confused. T3: "present"/"absent"/Fallback.
// T4: "the same"/"different"/Fallback. Comparison is case-insensitive on the
// trimmed value.
ControlValue parse_control(TaskId t, const std::string& value);

}  // namespace reascirc
