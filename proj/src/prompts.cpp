#include "reascirc/prompts.hpp"

#include <array>

#include "reascirc/error.hpp"
#include "reascirc/text.hpp"

namespace reascirc {

namespace {

enum class SegKind { Literal, Slot, Sentinel0, Sentinel1 };

struct Segment {
  SegKind kind;
  std::string text;  // literal text or slot name
};

struct TaskTemplate {
  std::vector<Segment> segments;
  std::vector<std::string> slots;  // in template order
  int arity = 1;
};

Segment lit(std::string s) { return {SegKind::Literal, std::move(s)}; }
Segment sl(std::string name) { return {SegKind::Slot, std::move(name)}; }
Segment sent0() { return {SegKind::Sentinel0, {}}; }
Segment sent1() { return {SegKind::Sentinel1, {}}; }

TaskTemplate make_template(std::vector<Segment> segs, int arity) {
  TaskTemplate t;
  t.segments = std::move(segs);
  t.arity = arity;
  for (const Segment& s : t.segments)
    if (s.kind == SegKind::Slot) t.slots.push_back(s.text);
  return t;
}

const std::array<TaskTemplate, 14>& templates() {
  using namespace slot;
  static const std::array<TaskTemplate, 14> table = {
      // T1
      make_template({lit("Context 1: "), sl(p1), lit(" Context 2: "), sl(p2),
                     lit(" Answer: "), sl(answer),
                     lit(" Common entities found: "), sent0(),
                     lit(" Question type: "), sent1()},
                    2),
      // T2: same surface as T1 up to the second sentinel, which here names
      // the bridge entity the task produces.
      make_template({lit("Context 1: "), sl(p1), lit(" Context 2: "), sl(p2),
                     lit(" Answer: "), sl(answer),
                     lit(" Common entities found: "), sent0(),
                     lit(" Bridge entity: "), sent1()},
                    2),
      // T3
      make_template({lit("Answer: "), sl(answer), lit(" is "), sent0(),
                     lit(" in context: "), sl(passage)},
                    1),
      // T4
      make_template({lit("Entities: "), sl(answer), lit(" and "), sl(bridge),
                     lit(" are "), sent0(), lit(".")},
                    1),
      // T5
      make_template({lit("Context: "), sl(passage), lit(" Bridge entity: "),
                     sl(bridge), lit(" Answer: "), sl(answer),
                     lit(" Assertion: "), sent0()},
                    1),
      // T6
      make_template({lit("Context: "), sl(passage), lit(" Bridge entity: "),
                     sl(bridge), lit(" Assertion: "), sent0()},
                    1),
      // T7
      make_template({lit("Bridge entity: "), sl(bridge), lit(" Assertion 1: "),
                     sl(s1), lit(" Assertion 2: "), sl(s2), lit(" Combined: "),
                     sent0()},
                    1),
      // T8
      make_template({lit("Removing bridge entity: "), sl(bridge),
                     lit(" from: "), sl(combined), lit(" We get: "), sent0()},
                    1),
      // T9
      make_template({lit("Contract answer entity "), sl(answer),
                     lit(" from: "), sl(combined_minus_bridge),
                     lit(" We get: "), sent0()},
                    1),
      // T10
      make_template({lit("Turn: "), sl(combined_minus_bridge_answer),
                     lit(" into question: "), sent0()},
                    1),
      // T11
      make_template({lit("Context 1: "), sl(p1), lit(" Context 2: "), sl(p2),
                     lit(" Answer: "), sl(answer),
                     lit(" Assertion from Context 1: "), sent0(),
                     lit(" Assertion from Context 2: "), sent1()},
                    2),
      // T12
      make_template({lit("Assertion 1: "), sl(s1), lit(" Assertion 2: "),
                     sl(s2), lit(" Combine, compare and think: "), sent0()},
                    1),
      // T13
      make_template({lit("Combined assertion: "), sl(combined),
                     lit(" Answer: "), sl(answer), lit(" Question: "), sent0()},
                    1),
      // Baseline
      make_template({lit("Context 1: "), sl(p1), lit(" Context 2: "), sl(p2),
                     lit(" Answer: "), sl(answer), lit(" Question type: "),
                     sent0()},
                    1),
  };
  return table;
}

const TaskTemplate& template_for(TaskId t) {
  return templates()[static_cast<size_t>(t)];
}

constexpr const char* kTaskNames[] = {"T1", "T2",  "T3",  "T4",  "T5",
                                      "T6", "T7",  "T8",  "T9",  "T10",
                                      "T11", "T12", "T13", "Baseline"};

}  // namespace

const char* to_string(TaskId t) { return kTaskNames[static_cast<size_t>(t)]; }

std::optional<TaskId> task_from_string(std::string_view s) {
  for (size_t i = 0; i < std::size(kTaskNames); ++i)
    if (s == kTaskNames[i]) return static_cast<TaskId>(i);
  return std::nullopt;
}

bool is_control_task(TaskId t) {
  return t == TaskId::T1 || t == TaskId::T3 || t == TaskId::T4;
}

void SentinelConfig::check() const {
  if (sentinel_0.empty() || sentinel_1.empty())
    throw Error(ErrorKind::Contract, "sentinel strings must be non-empty");
  if (sentinel_0 == sentinel_1)
    throw Error(ErrorKind::Contract, "sentinel strings must be distinct");
  if (sentinel_0.find(sentinel_1) != std::string::npos ||
      sentinel_1.find(sentinel_0) != std::string::npos)
    throw Error(ErrorKind::Contract,
                "one sentinel must not be a substring of the other");
}

const std::vector<std::string>& input_slots(TaskId t) {
  return template_for(t).slots;
}

int output_arity(TaskId t) { return template_for(t).arity; }

std::string render_input(TaskId t, const SlotMap& slots,
                         const SentinelConfig& s) {
  s.check();
  const TaskTemplate& tpl = template_for(t);
  for (const std::string& name : tpl.slots)
    if (!slots.count(name))
      throw Error(ErrorKind::Contract, std::string(to_string(t)) +
                                           ": missing slot \"" + name + "\"");
  for (const auto& [name, value] : slots) {
    bool known = false;
    for (const std::string& n : tpl.slots)
      if (n == name) known = true;
    if (!known)
      throw Error(ErrorKind::Contract, std::string(to_string(t)) +
                                           ": unexpected slot \"" + name +
                                           "\"");
    if (value.find(s.sentinel_0) != std::string::npos ||
        value.find(s.sentinel_1) != std::string::npos)
      throw Error(ErrorKind::Contract,
                  std::string(to_string(t)) + ": slot \"" + name +
                      "\" contains a sentinel string");
  }
  std::string out;
  for (const Segment& seg : tpl.segments) {
    switch (seg.kind) {
      case SegKind::Literal: out += seg.text; break;
      case SegKind::Slot: out += slots.at(seg.text); break;
      case SegKind::Sentinel0: out += s.sentinel_0; break;
      case SegKind::Sentinel1: out += s.sentinel_1; break;
    }
  }
  return out;
}

std::string render_target(TaskId t, const std::vector<std::string>& outputs,
                          const SentinelConfig& s) {
  s.check();
  const int arity = output_arity(t);
  if (static_cast<int>(outputs.size()) != arity)
    throw Error(ErrorKind::Contract,
                std::string(to_string(t)) + ": expected " +
                    std::to_string(arity) + " output value(s), got " +
                    std::to_string(outputs.size()));
  std::string out = s.sentinel_0 + " " + outputs[0];
  if (arity == 2) out += " " + s.sentinel_1 + " " + outputs[1];
  return out;
}

ParsedOutput parse_output(TaskId t, const std::string& raw,
                          const SentinelConfig& s) {
  s.check();
  ParsedOutput result;
  result.raw = raw;
  const int arity = output_arity(t);
  const std::string* sentinels[2] = {&s.sentinel_0, &s.sentinel_1};

  size_t cursor = 0;
  std::vector<std::pair<size_t, size_t>> spans;  // value start, end
  for (int i = 0; i < arity; ++i) {
    size_t pos = raw.find(*sentinels[i], cursor);
    if (pos == std::string::npos) return result;  // expected sentinel absent
    cursor = pos + sentinels[i]->size();
    spans.emplace_back(cursor, raw.size());
    if (i > 0) spans[i - 1].second = pos;
  }
  // Anything after the last expected value up to a stray sentinel is noise.
  size_t tail = std::string::npos;
  for (const std::string* sent : sentinels) {
    size_t pos = raw.find(*sent, spans.back().first);
    if (pos != std::string::npos) tail = std::min(tail, pos);
  }
  if (tail != std::string::npos) spans.back().second = tail;

  for (auto [b, e] : spans)
    result.values.push_back(trim(std::string_view(raw).substr(b, e - b)));
  result.ok = true;
  return result;
}

ControlValue parse_control(TaskId t, const std::string& value) {
  if (!is_control_task(t))
    throw Error(ErrorKind::Contract,
                std::string(to_string(t)) + " is not a control task");
  std::string v = ascii_lower(trim(value));
  if (t == TaskId::T1) {
    if (v == "bridge") return ControlValue::Bridge;
    if (v == "comparison") return ControlValue::Comparison;
    return ControlValue::Confused;
  }
  if (t == TaskId::T3) {
    if (v == "present") return ControlValue::True;
    if (v == "absent") return ControlValue::False;
    return ControlValue::Fallback;
  }
  if (v == "the same") return ControlValue::True;
  if (v == "different") return ControlValue::False;
  return ControlValue::Fallback;
}

}  // namespace reascirc
