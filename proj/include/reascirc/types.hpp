#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace reascirc {

enum class QuestionType { Bridge, Comparison };
enum class Tri { Unset, True, False };
enum class CircuitType { Bridge, Comparison, Confused, Unset };
enum class Pool { Train, Dev };

const char* to_string(QuestionType t);
const char* to_string(Tri t);
const char* to_string(CircuitType t);
const char* to_string(Pool p);

std::optional<QuestionType> question_type_from_string(std::string_view s);
std::optional<Pool> pool_from_string(std::string_view s);

struct Passage {
  std::string title;
  std::vector<std::string> sentences;
  std::optional<std::set<int>> supporting;
};

struct MQGInput {
  Passage p1;
  Passage p2;
  std::string answer;
};

struct GoldExample {
  std::string id;
  MQGInput input;
  std::string gold_question;  // empty when the dataset carries none
  std::optional<QuestionType> gold_type;
};

// Routing variables captured during one circuit run (or declared by an
// annotator). Each field moves Unset -> set at most once.
struct ControlState {
  CircuitType q_type = CircuitType::Unset;
  Tri in_a_p1 = Tri::Unset;
  Tri in_a_p2 = Tri::Unset;
  Tri same_a_b = Tri::Unset;

  void set_q_type(CircuitType v) {
    if (q_type != CircuitType::Unset)
      throw std::logic_error("q_type already set");
    q_type = v;
  }
  void set_in_a_p(int passage_index, bool v) {
    Tri& slot = passage_index == 1 ? in_a_p1 : in_a_p2;
    if (slot != Tri::Unset) throw std::logic_error("in_a_p already set");
    slot = v ? Tri::True : Tri::False;
  }
  void set_same_a_b(bool v) {
    if (same_a_b != Tri::Unset) throw std::logic_error("same_a_b already set");
    same_a_b = v ? Tri::True : Tri::False;
  }
};

struct BridgeRationale {
  std::string bridge;
  std::optional<std::string> s1;
  std::optional<std::string> s2;
  std::string combined;
  std::optional<std::string> combined_minus_bridge;  // absent iff same_a_b
  std::string combined_minus_bridge_answer;
  std::string question;
  ControlState controls;
};

struct ComparisonRationale {
  std::string s1;
  std::string s2;
  std::string combined;
  std::string question;
};

struct AnnotatedExample {
  GoldExample example;
  std::optional<BridgeRationale> bridge_rationale;
  std::optional<ComparisonRationale> comparison_rationale;
  Pool split = Pool::Train;

  bool is_bridge() const { return bridge_rationale.has_value(); }
};

enum class Severity { Error, Warning };

struct Violation {
  std::string record_id;
  std::string rule;
  std::string message;
  Severity severity = Severity::Error;
};

struct ValidationReport {
  std::vector<Violation> items;

  bool has_errors() const {
    for (const auto& v : items)
      if (v.severity == Severity::Error) return true;
    return false;
  }
  size_t error_count() const {
    size_t n = 0;
    for (const auto& v : items)
      if (v.severity == Severity::Error) ++n;
    return n;
  }
};

}  // namespace reascirc
