#include "reascirc/circuit.hpp"

#include <fstream>

#include <json.hpp>

#include "reascirc/text.hpp"
#include "reascirc/version.hpp"

namespace reascirc {

using nlohmann::ordered_json;

const char* to_string(ConfusedPolicy p) {
  switch (p) {
    case ConfusedPolicy::Both: return "both";
    case ConfusedPolicy::BridgeOnly: return "bridge_only";
    case ConfusedPolicy::ComparisonOnly: return "comparison_only";
  }
  return "both";
}

const char* to_string(ValidatorMode m) {
  return m == ValidatorMode::Warn ? "warn" : "reject";
}

std::optional<ConfusedPolicy> confused_policy_from_string(std::string_view s) {
  if (s == "both") return ConfusedPolicy::Both;
  if (s == "bridge_only") return ConfusedPolicy::BridgeOnly;
  if (s == "comparison_only") return ConfusedPolicy::ComparisonOnly;
  return std::nullopt;
}

int RunConfig::tokens_for(TaskId t) const {
  auto it = max_new_tokens_per_task.find(t);
  int n = it != max_new_tokens_per_task.end() ? it->second : max_new_tokens;
  if (n < 1)
    throw Error(ErrorKind::Config, "max_new_tokens must be at least 1");
  return n;
}

std::vector<StatementStep> bridge_statement_plan(const ControlState& st) {
  if (st.in_a_p1 == Tri::Unset || st.in_a_p2 == Tri::Unset ||
      st.same_a_b == Tri::Unset)
    throw Error(ErrorKind::Contract,
                "bridge_statement_plan requires in_a_p1, in_a_p2 and same_a_b");
  bool in1 = st.in_a_p1 == Tri::True;
  bool in2 = st.in_a_p2 == Tri::True;
  bool same = st.same_a_b == Tri::True;

  if (same) return {{TaskId::T6, 1}, {TaskId::T6, 2}};
  if (in1 && in2) return {{TaskId::T5, 1}, {TaskId::T5, 2}};
  if (in1) return {{TaskId::T5, 1}, {TaskId::T6, 2}};
  if (in2) return {{TaskId::T5, 2}, {TaskId::T6, 1}};
  return {{TaskId::T6, 1}, {TaskId::T6, 2}};
}

std::vector<std::string> validate_step(TaskId task,
                                       const std::vector<std::string>& parsed,
                                       const SlotMap& context) {
  std::vector<std::string> flags;
  if (parsed.empty()) return flags;
  const std::string& out = parsed[0];
  auto ctx = [&](const char* key) -> const std::string& {
    auto it = context.find(key);
    if (it == context.end())
      throw Error(ErrorKind::Contract,
                  std::string("validate_step: missing context value \"") +
                      key + "\"");
    return it->second;
  };

  switch (task) {
    case TaskId::T7:
    case TaskId::T12: {
      size_t out_len = eval_tokenize(out).size();
      size_t s1_len = eval_tokenize(ctx(slot::s1)).size();
      size_t s2_len = eval_tokenize(ctx(slot::s2)).size();
      if (2 * out_len < std::max(s1_len, s2_len))
        flags.push_back("combination-too-short");
      break;
    }
    case TaskId::T8:
      if (contains_token_span(out, ctx(slot::bridge)))
        flags.push_back("bridge-retained");
      break;
    case TaskId::T9:
      if (contains_token_span(out, ctx(slot::answer)))
        flags.push_back("answer-retained");
      if (contains_token_span(out, ctx(slot::bridge)))
        flags.push_back("bridge-retained");
      break;
    case TaskId::T10:
    case TaskId::T13: {
      std::string t = trim(out);
      if (t.empty() || t.back() != '?') flags.push_back("not-a-question");
      break;
    }
    default:
      break;
  }
  return flags;
}

bool control_fallback(TaskId task, const MQGInput& x, ContextMode mode,
                      int passage_index,
                      const std::optional<std::string>& bridge) {
  if (task == TaskId::T3) {
    const Passage& p = passage_index == 1 ? x.p1 : x.p2;
    return contains_token_span(select_context(p, mode), x.answer);
  }
  if (task == TaskId::T4) {
    if (!bridge)
      throw Error(ErrorKind::Contract, "T4 fallback requires the bridge value");
    return equals_ci(trim(x.answer), trim(*bridge));
  }
  throw Error(ErrorKind::Contract, "control_fallback handles only T3 and T4");
}

namespace {

class CircuitRun {
 public:
  CircuitRun(std::string input_id, const MQGInput& x, Backend& backend,
             const RunConfig& cfg)
      : x_(x), backend_(backend), cfg_(cfg) {
    trace_.input_id = std::move(input_id);
    ctx1_ = select_context(x.p1, cfg.context_mode);
    ctx2_ = select_context(x.p2, cfg.context_mode);
  }

  CircuitTrace run() {
    ParsedOutput t1 = call(TaskId::T1, std::nullopt,
                           {{slot::p1, ctx1_}, {slot::p2, ctx2_},
                            {slot::answer, x_.answer}});
    CircuitType q_type = CircuitType::Confused;
    if (t1.ok) {
      switch (parse_control(TaskId::T1, t1.values[1])) {
        case ControlValue::Bridge: q_type = CircuitType::Bridge; break;
        case ControlValue::Comparison: q_type = CircuitType::Comparison; break;
        default: q_type = CircuitType::Confused; break;
      }
    }
    trace_.controls.set_q_type(q_type);

    bool run_bridge =
        q_type == CircuitType::Bridge ||
        (q_type == CircuitType::Confused &&
         cfg_.confused_policy != ConfusedPolicy::ComparisonOnly);
    bool run_comparison =
        q_type == CircuitType::Comparison ||
        (q_type == CircuitType::Confused &&
         cfg_.confused_policy != ConfusedPolicy::BridgeOnly);

    if (run_bridge) bridge_branch();
    if (run_comparison) comparison_branch();
    return std::move(trace_);
  }

 private:
  const MQGInput& x_;
  Backend& backend_;
  const RunConfig& cfg_;
  CircuitTrace trace_;
  std::string ctx1_, ctx2_;

  const std::string& ctx(int passage_index) const {
    return passage_index == 1 ? ctx1_ : ctx2_;
  }

  [[noreturn]] void abort_run(const std::string& message) {
    throw RunError(trace_.input_id + ": " + message, std::move(trace_));
  }

  // One backend call per step; the step is recorded before any abort.
  ParsedOutput call(TaskId task, std::optional<int> passage_index,
                    SlotMap slots, const SlotMap& validator_context = {}) {
    StepRecord step;
    step.task = task;
    step.passage_index = passage_index;
    step.prompt = render_input(task, slots, cfg_.sentinels);

    GenRequest request;
    request.prompt = step.prompt;
    request.max_new_tokens = cfg_.tokens_for(task);
    request.example_id = trace_.input_id;
    request.task = task;
    request.passage_index = passage_index;

    GenResponse response;
    try {
      response = backend_.generate(request);
    } catch (const Error& e) {
      step.raw_generation = "";
      trace_.steps.push_back(std::move(step));
      abort_run(std::string("backend failure on ") + to_string(task) + ": " +
                e.what());
    }
    step.raw_generation = response.text;

    ParsedOutput parsed = parse_output(task, response.text, cfg_.sentinels);
    step.parse_ok = parsed.ok;
    if (parsed.ok) {
      step.parsed = parsed.values;
      step.validator_flags = validate_step(task, parsed.values,
                                           validator_context);
    }
    bool reject = cfg_.validator_mode == ValidatorMode::Reject &&
                  !step.validator_flags.empty();
    std::string flags = join(step.validator_flags, ", ");
    trace_.steps.push_back(std::move(step));

    if (!parsed.ok && !is_control_task(task))
      abort_run(std::string("parse failure on generative task ") +
                to_string(task));
    if (reject)
      abort_run(std::string("validator rejected ") + to_string(task) + " (" +
                flags + ")");
    return parsed;
  }

  bool control_bool(TaskId task, const ParsedOutput& parsed, int passage_index,
                    const std::optional<std::string>& bridge) {
    if (parsed.ok) {
      switch (parse_control(task, parsed.values[0])) {
        case ControlValue::True: return true;
        case ControlValue::False: return false;
        default: break;
      }
    }
    return control_fallback(task, x_, cfg_.context_mode, passage_index, bridge);
  }

  void bridge_branch() {
    ParsedOutput t2 = call(TaskId::T2, std::nullopt,
                           {{slot::p1, ctx1_}, {slot::p2, ctx2_},
                            {slot::answer, x_.answer}});
    const std::string bridge = t2.values[1];

    ParsedOutput t3a = call(TaskId::T3, 1,
                            {{slot::answer, x_.answer}, {slot::passage, ctx1_}});
    trace_.controls.set_in_a_p(1, control_bool(TaskId::T3, t3a, 1, bridge));
    ParsedOutput t3b = call(TaskId::T3, 2,
                            {{slot::answer, x_.answer}, {slot::passage, ctx2_}});
    trace_.controls.set_in_a_p(2, control_bool(TaskId::T3, t3b, 2, bridge));

    ParsedOutput t4 = call(TaskId::T4, std::nullopt,
                           {{slot::answer, x_.answer}, {slot::bridge, bridge}});
    trace_.controls.set_same_a_b(control_bool(TaskId::T4, t4, 0, bridge));

    std::string s1_text, s2_text;
    for (const StatementStep& st : bridge_statement_plan(trace_.controls)) {
      SlotMap slots{{slot::passage, ctx(st.passage_index)},
                    {slot::bridge, bridge}};
      if (st.task == TaskId::T5) slots[slot::answer] = x_.answer;
      ParsedOutput out = call(st.task, st.passage_index, std::move(slots));
      (st.passage_index == 1 ? s1_text : s2_text) = out.values[0];
    }

    ParsedOutput t7 = call(TaskId::T7, std::nullopt,
                           {{slot::bridge, bridge}, {slot::s1, s1_text},
                            {slot::s2, s2_text}},
                           {{slot::s1, s1_text}, {slot::s2, s2_text}});
    std::string combined = t7.values[0];

    std::string contracted = combined;
    if (trace_.controls.same_a_b == Tri::False) {
      ParsedOutput t8 = call(TaskId::T8, std::nullopt,
                             {{slot::bridge, bridge},
                              {slot::combined, combined}},
                             {{slot::bridge, bridge}});
      contracted = t8.values[0];
    }

    ParsedOutput t9 = call(TaskId::T9, std::nullopt,
                           {{slot::answer, x_.answer},
                            {slot::combined_minus_bridge, contracted}},
                           {{slot::answer, x_.answer}, {slot::bridge, bridge}});

    ParsedOutput t10 = call(TaskId::T10, std::nullopt,
                            {{slot::combined_minus_bridge_answer,
                              t9.values[0]}});
    trace_.questions.push_back({QuestionType::Bridge, t10.values[0]});
  }

  void comparison_branch() {
    ParsedOutput t11 = call(TaskId::T11, std::nullopt,
                            {{slot::p1, ctx1_}, {slot::p2, ctx2_},
                             {slot::answer, x_.answer}});
    const std::string s1_text = t11.values[0];
    const std::string s2_text = t11.values[1];

    ParsedOutput t12 = call(TaskId::T12, std::nullopt,
                            {{slot::s1, s1_text}, {slot::s2, s2_text}},
                            {{slot::s1, s1_text}, {slot::s2, s2_text}});

    ParsedOutput t13 = call(TaskId::T13, std::nullopt,
                            {{slot::combined, t12.values[0]},
                             {slot::answer, x_.answer}});
    trace_.questions.push_back({QuestionType::Comparison, t13.values[0]});
  }
};

}  // namespace

CircuitTrace run_circuit(const std::string& input_id, const MQGInput& x,
                         Backend& backend, const RunConfig& cfg) {
  return CircuitRun(input_id, x, backend, cfg).run();
}

CircuitTrace run_circuit(const GoldExample& example, Backend& backend,
                         const RunConfig& cfg) {
  return run_circuit(example.id, example.input, backend, cfg);
}

std::vector<TaskId> CircuitTrace::task_sequence() const {
  std::vector<TaskId> out;
  out.reserve(steps.size());
  for (const StepRecord& s : steps) out.push_back(s.task);
  return out;
}

std::string CircuitTrace::to_json() const {
  ordered_json obj;
  obj["input_id"] = input_id;
  obj["controls"] = {{"q_type", to_string(controls.q_type)},
                     {"in_a_p1", to_string(controls.in_a_p1)},
                     {"in_a_p2", to_string(controls.in_a_p2)},
                     {"same_a_b", to_string(controls.same_a_b)}};
  ordered_json steps_json = ordered_json::array();
  for (const StepRecord& s : steps) {
    ordered_json step;
    step["task"] = to_string(s.task);
    if (s.passage_index) step["passage_index"] = *s.passage_index;
    step["prompt"] = s.prompt;
    step["raw_generation"] = s.raw_generation;
    if (s.parse_ok)
      step["parsed"] = s.parsed;
    else
      step["parsed"] = nullptr;
    step["validator_flags"] = s.validator_flags;
    steps_json.push_back(std::move(step));
  }
  obj["steps"] = std::move(steps_json);
  ordered_json questions_json = ordered_json::array();
  for (const GeneratedQuestion& q : questions)
    questions_json.push_back({{"q_type", to_string(q.type)}, {"text", q.text}});
  obj["questions"] = std::move(questions_json);
  obj["version"] = REASCIRC_VERSION_STRING;
  return obj.dump(2);
}

void write_trace(const CircuitTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write trace: " + path);
  out << trace.to_json() << '\n';
}

}  // namespace reascirc
