#include "reascirc/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reascirc/error.hpp"
#include "reascirc/text.hpp"

namespace reascirc {

using nlohmann::ordered_json;

const char* to_string(QuestionType t) {
  return t == QuestionType::Bridge ? "bridge" : "comparison";
}

const char* to_string(Tri t) {
  switch (t) {
    case Tri::Unset: return "unset";
    case Tri::True: return "true";
    case Tri::False: return "false";
  }
  return "unset";
}

const char* to_string(CircuitType t) {
  switch (t) {
    case CircuitType::Bridge: return "bridge";
    case CircuitType::Comparison: return "comparison";
    case CircuitType::Confused: return "confused";
    case CircuitType::Unset: return "unset";
  }
  return "unset";
}

const char* to_string(Pool p) {
  return p == Pool::Train ? "train_pool" : "dev_pool";
}

const char* to_string(ContextMode m) {
  return m == ContextMode::Full ? "full" : "supporting";
}

std::optional<QuestionType> question_type_from_string(std::string_view s) {
  if (s == "bridge") return QuestionType::Bridge;
  if (s == "comparison") return QuestionType::Comparison;
  return std::nullopt;
}

std::optional<Pool> pool_from_string(std::string_view s) {
  if (s == "train_pool") return Pool::Train;
  if (s == "dev_pool") return Pool::Dev;
  return std::nullopt;
}

std::optional<ContextMode> context_mode_from_string(std::string_view s) {
  if (s == "full") return ContextMode::Full;
  if (s == "supporting") return ContextMode::Supporting;
  return std::nullopt;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t line_of_offset(const std::string& content, size_t offset) {
  size_t line = 1;
  for (size_t i = 0; i < offset && i < content.size(); ++i)
    if (content[i] == '\n') ++line;
  return line;
}

const ordered_json& require_field(const ordered_json& obj,
                                  const std::string& key,
                                  const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorKind::Schema, "missing field \"" + key + "\" in " + where);
  return *it;
}

std::string require_string(const ordered_json& obj, const std::string& key,
                           const std::string& where) {
  const auto& v = require_field(obj, key, where);
  if (!v.is_string())
    throw Error(ErrorKind::Schema,
                "field \"" + key + "\" must be a string in " + where);
  return v.get<std::string>();
}

Passage parse_passage(const ordered_json& obj, const std::string& where) {
  if (!obj.is_object())
    throw Error(ErrorKind::Schema, where + " must be an object");
  Passage p;
  p.title = require_string(obj, "title", where);
  const auto& sents = require_field(obj, "sentences", where);
  if (!sents.is_array() || sents.empty())
    throw Error(ErrorKind::Schema,
                "field \"sentences\" must be a non-empty array in " + where);
  for (const auto& s : sents) {
    if (!s.is_string())
      throw Error(ErrorKind::Schema,
                  "field \"sentences\" must hold strings in " + where);
    p.sentences.push_back(s.get<std::string>());
  }
  if (auto it = obj.find("supporting"); it != obj.end() && !it->is_null()) {
    if (!it->is_array())
      throw Error(ErrorKind::Schema,
                  "field \"supporting\" must be an array in " + where);
    std::set<int> sup;
    for (const auto& idx : it->items()) {
      if (!idx.value().is_number_integer())
        throw Error(ErrorKind::Schema,
                    "field \"supporting\" must hold integers in " + where);
      int i = idx.value().get<int>();
      if (i < 0 || static_cast<size_t>(i) >= p.sentences.size())
        throw Error(ErrorKind::Schema, "field \"supporting\" index " +
                                           std::to_string(i) +
                                           " out of range in " + where);
      sup.insert(i);
    }
    p.supporting = std::move(sup);
  }
  return p;
}

GoldExample parse_gold_example(const ordered_json& obj,
                               const std::string& where) {
  GoldExample ex;
  ex.id = require_string(obj, "id", where);
  ex.input.p1 = parse_passage(require_field(obj, "p1", where), where + ".p1");
  ex.input.p2 = parse_passage(require_field(obj, "p2", where), where + ".p2");
  ex.input.answer = require_string(obj, "answer", where);
  if (trim(ex.input.answer).empty())
    throw Error(ErrorKind::Schema,
                "field \"answer\" must be non-empty in " + where);
  if (auto it = obj.find("gold_question"); it != obj.end() && !it->is_null())
    ex.gold_question = it->get<std::string>();
  if (auto it = obj.find("gold_type"); it != obj.end() && !it->is_null()) {
    auto t = question_type_from_string(it->get<std::string>());
    if (!t)
      throw Error(ErrorKind::Schema,
                  "field \"gold_type\" must be \"bridge\" or \"comparison\" in " +
                      where);
    ex.gold_type = t;
  }
  return ex;
}

ordered_json passage_to_json(const Passage& p) {
  ordered_json obj;
  obj["title"] = p.title;
  obj["sentences"] = p.sentences;
  if (p.supporting) {
    obj["supporting"] = std::vector<int>(p.supporting->begin(),
                                         p.supporting->end());
  }
  return obj;
}

bool tri_as_bool(Tri t) { return t == Tri::True; }

}  // namespace

std::vector<GoldExample> parse_dataset_file(const std::string& path) {
  std::string content = read_file(path);
  ordered_json root;
  try {
    root = ordered_json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse,
                "malformed JSON in " + path + " at line " +
                    std::to_string(line_of_offset(content, e.byte)) + ": " +
                    e.what());
  }
  if (!root.is_array())
    throw Error(ErrorKind::Schema, "dataset file must be a JSON array: " + path);
  std::vector<GoldExample> out;
  out.reserve(root.size());
  for (size_t i = 0; i < root.size(); ++i) {
    out.push_back(
        parse_gold_example(root[i], "record " + std::to_string(i)));
  }
  return out;
}

std::string select_context(const Passage& p, ContextMode mode) {
  if (mode == ContextMode::Full) {
    return p.title + " - " + join(p.sentences);
  }
  if (!p.supporting)
    throw Error(ErrorKind::Config,
                "context mode \"supporting\" requires a supporting set");
  std::vector<std::string> kept;
  for (int i : *p.supporting) kept.push_back(p.sentences[i]);
  return join(kept);
}

ValidationReport validate_annotation(const AnnotatedExample& a) {
  ValidationReport report;
  const std::string& id = a.example.id;
  auto err = [&](std::string rule, std::string msg) {
    report.items.push_back(
        {id, std::move(rule), std::move(msg), Severity::Error});
  };
  auto warn = [&](std::string rule, std::string msg) {
    report.items.push_back(
        {id, std::move(rule), std::move(msg), Severity::Warning});
  };

  if (a.bridge_rationale.has_value() == a.comparison_rationale.has_value()) {
    err("rationale-missing", "record must carry exactly one rationale");
    return report;
  }
  if (!a.example.gold_type) {
    err("missing-field:gold_type", "annotation records must declare gold_type");
    return report;
  }
  bool type_matches =
      (a.example.gold_type == QuestionType::Bridge) == a.is_bridge();
  if (!type_matches)
    err("rationale-type-mismatch", "rationale variant disagrees with gold_type");

  const std::string ctx1 = select_context(a.example.input.p1, ContextMode::Full);
  const std::string ctx2 = select_context(a.example.input.p2, ContextMode::Full);
  const std::string& answer = a.example.input.answer;

  if (a.is_bridge()) {
    const BridgeRationale& r = *a.bridge_rationale;
    if (trim(r.bridge).empty()) err("field-empty:bridge", "bridge is empty");
    if (trim(r.combined).empty()) err("field-empty:combined", "combined is empty");
    if (trim(r.combined_minus_bridge_answer).empty())
      err("field-empty:combined_minus_bridge_answer",
          "combined_minus_bridge_answer is empty");
    if (trim(r.question).empty()) err("question-empty", "question is empty");
    if (!r.s1 || !r.s2)
      err("missing-statement", "bridge rationale needs both s1 and s2");

    if (r.controls.in_a_p1 == Tri::Unset || r.controls.in_a_p2 == Tri::Unset ||
        r.controls.same_a_b == Tri::Unset) {
      err("controls-unset", "in_a_p1, in_a_p2 and same_a_b must be declared");
      return report;
    }

    bool same = r.controls.same_a_b == Tri::True;
    if (same && r.combined_minus_bridge)
      err("skip-rule-violated",
          "combined_minus_bridge present although same_a_b is true");
    if (!same && !r.combined_minus_bridge)
      err("skip-rule-violated",
          "combined_minus_bridge absent although same_a_b is false");

    if (!trim(r.bridge).empty()) {
      if (!contains_token_span(ctx1, r.bridge) ||
          !contains_token_span(ctx2, r.bridge))
        err("bridge-not-in-both",
            "bridge span does not occur in both passages");
      if (r.combined_minus_bridge &&
          contains_token_span(*r.combined_minus_bridge, r.bridge))
        err("bridge-not-contracted",
            "combined_minus_bridge still contains the bridge span");
      if (contains_token_span(r.combined_minus_bridge_answer, r.bridge))
        err("bridge-not-contracted",
            "combined_minus_bridge_answer still contains the bridge span");
    }
    if (contains_token_span(r.combined_minus_bridge_answer, answer))
      err("answer-not-contracted",
          "combined_minus_bridge_answer still contains the answer span");

    // Annotator flags win over the containment test; disagreement is only
    // surfaced, not rejected.
    bool in1 = contains_token_span(ctx1, answer);
    bool in2 = contains_token_span(ctx2, answer);
    if (in1 != tri_as_bool(r.controls.in_a_p1))
      warn("control-mismatch:in_a_p1",
           "declared in_a_p1 disagrees with the containment test");
    if (in2 != tri_as_bool(r.controls.in_a_p2))
      warn("control-mismatch:in_a_p2",
           "declared in_a_p2 disagrees with the containment test");
    if (equals_ci(trim(answer), trim(r.bridge)) != same)
      warn("control-mismatch:same_a_b",
           "declared same_a_b disagrees with string equality of answer and bridge");
  } else {
    const ComparisonRationale& r = *a.comparison_rationale;
    if (trim(r.s1).empty()) err("field-empty:s1", "s1 is empty");
    if (trim(r.s2).empty()) err("field-empty:s2", "s2 is empty");
    if (trim(r.combined).empty()) err("field-empty:combined", "combined is empty");
    if (trim(r.question).empty()) err("question-empty", "question is empty");
  }
  return report;
}

namespace {

// Record-scoped parse used by load_annotations: schema problems become report
// items rather than exceptions so one pass can report the whole file.
std::optional<AnnotatedExample> parse_annotation_record(
    const ordered_json& obj, size_t line_no, ValidationReport& report) {
  std::string id = obj.contains("id") && obj["id"].is_string()
                       ? obj["id"].get<std::string>()
                       : "line " + std::to_string(line_no);
  auto fail = [&](const std::string& rule, const std::string& msg) {
    report.items.push_back({id, rule, msg, Severity::Error});
  };

  AnnotatedExample a;
  try {
    a.example = parse_gold_example(obj, "record " + id);
  } catch (const Error& e) {
    fail("schema", e.what());
    return std::nullopt;
  }
  if (!a.example.gold_type) {
    fail("missing-field:gold_type", "annotation records must declare gold_type");
    return std::nullopt;
  }
  auto split_it = obj.find("split");
  if (split_it == obj.end() || !split_it->is_string()) {
    fail("missing-field:split",
         "annotation records must declare split (train_pool|dev_pool)");
    return std::nullopt;
  }
  auto pool = pool_from_string(split_it->get<std::string>());
  if (!pool) {
    fail("bad-field:split", "split must be train_pool or dev_pool");
    return std::nullopt;
  }
  a.split = *pool;

  auto get_str = [&](const char* key) -> std::optional<std::string> {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
      fail(std::string("bad-field:") + key, "field must be a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  };
  auto get_bool = [&](const char* key) -> std::optional<bool> {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) {
      fail(std::string("bad-field:") + key, "field must be a boolean");
      return std::nullopt;
    }
    return it->get<bool>();
  };
  auto require_str = [&](const char* key) -> std::optional<std::string> {
    auto v = get_str(key);
    if (!v) fail(std::string("missing-field:") + key, "required field absent");
    return v;
  };

  if (*a.example.gold_type == QuestionType::Bridge) {
    BridgeRationale r;
    auto bridge = require_str("bridge");
    auto combined = require_str("combined");
    auto cba = require_str("combined_minus_bridge_answer");
    auto question = require_str("question");
    auto in1 = get_bool("in_a_p1");
    auto in2 = get_bool("in_a_p2");
    auto same = get_bool("same_a_b");
    if (!in1) fail("missing-field:in_a_p1", "required field absent");
    if (!in2) fail("missing-field:in_a_p2", "required field absent");
    if (!same) fail("missing-field:same_a_b", "required field absent");
    if (!bridge || !combined || !cba || !question || !in1 || !in2 || !same)
      return std::nullopt;
    r.bridge = *bridge;
    r.s1 = get_str("s1");
    r.s2 = get_str("s2");
    r.combined = *combined;
    r.combined_minus_bridge = get_str("combined_minus_bridge");
    r.combined_minus_bridge_answer = *cba;
    r.question = *question;
    r.controls.set_q_type(CircuitType::Bridge);
    r.controls.set_in_a_p(1, *in1);
    r.controls.set_in_a_p(2, *in2);
    r.controls.set_same_a_b(*same);
    a.bridge_rationale = std::move(r);
  } else {
    ComparisonRationale r;
    auto s1 = require_str("s1");
    auto s2 = require_str("s2");
    auto combined = require_str("combined");
    auto question = require_str("question");
    if (!s1 || !s2 || !combined || !question) return std::nullopt;
    r.s1 = *s1;
    r.s2 = *s2;
    r.combined = *combined;
    r.question = *question;
    a.comparison_rationale = std::move(r);
  }
  return a;
}

}  // namespace

AnnotationLoad load_annotations(const std::string& path) {
  std::string content = read_file(path);
  AnnotationLoad out;
  std::istringstream in(content);
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
    if (!obj.is_object())
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + " in " +
                                        path + " is not a JSON object");
    auto rec = parse_annotation_record(obj, line_no, out.report);
    if (!rec) continue;
    ValidationReport vr = validate_annotation(*rec);
    out.report.items.insert(out.report.items.end(), vr.items.begin(),
                            vr.items.end());
    out.records.push_back(std::move(*rec));
  }
  return out;
}

std::vector<AnnotatedExample> parse_annotation_file(const std::string& path) {
  AnnotationLoad load = load_annotations(path);
  if (load.report.has_errors()) {
    std::string msg = "annotation file rejected: " + path;
    for (const auto& v : load.report.items) {
      if (v.severity != Severity::Error) continue;
      msg += "\n  " + v.record_id + ": " + v.rule + " (" + v.message + ")";
    }
    throw Error(ErrorKind::Validation, msg);
  }
  return load.records;
}

std::string serialize_annotations(const std::vector<AnnotatedExample>& pool) {
  std::string out;
  for (const AnnotatedExample& a : pool) {
    ordered_json obj;
    obj["id"] = a.example.id;
    obj["p1"] = passage_to_json(a.example.input.p1);
    obj["p2"] = passage_to_json(a.example.input.p2);
    obj["answer"] = a.example.input.answer;
    if (!a.example.gold_question.empty())
      obj["gold_question"] = a.example.gold_question;
    if (a.example.gold_type) obj["gold_type"] = to_string(*a.example.gold_type);
    obj["split"] = to_string(a.split);
    if (a.bridge_rationale) {
      const BridgeRationale& r = *a.bridge_rationale;
      obj["bridge"] = r.bridge;
      if (r.s1) obj["s1"] = *r.s1;
      if (r.s2) obj["s2"] = *r.s2;
      obj["combined"] = r.combined;
      if (r.combined_minus_bridge)
        obj["combined_minus_bridge"] = *r.combined_minus_bridge;
      obj["combined_minus_bridge_answer"] = r.combined_minus_bridge_answer;
      obj["question"] = r.question;
      obj["in_a_p1"] = r.controls.in_a_p1 == Tri::True;
      obj["in_a_p2"] = r.controls.in_a_p2 == Tri::True;
      obj["same_a_b"] = r.controls.same_a_b == Tri::True;
    } else if (a.comparison_rationale) {
      const ComparisonRationale& r = *a.comparison_rationale;
      obj["s1"] = r.s1;
      obj["s2"] = r.s2;
      obj["combined"] = r.combined;
      obj["question"] = r.question;
    }
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void write_annotation_file(const std::vector<AnnotatedExample>& pool,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write file: " + path);
  out << serialize_annotations(pool);
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

}  // namespace reascirc
