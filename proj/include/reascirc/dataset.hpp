#pragma once

#include <string>
#include <vector>

#include "reascirc/types.hpp"

namespace reascirc {

enum class ContextMode { Full, Supporting };

const char* to_string(ContextMode m);
std::optional<ContextMode> context_mode_from_string(std::string_view s);

// Dataset file: JSON array of
//   {id, p1:{title, sentences:[...], supporting:[int...]?}, p2:{...},
//    answer, gold_question?, gold_type?}
std::vector<GoldExample> parse_dataset_file(const std::string& path);

// Annotation file: JSON lines. Every record embeds the gold example plus its
// rationale fields (see README for the full schema). Throws
// ErrorKind::Validation with an aggregated report if any record fails;
// nothing is returned for a partially valid file.
std::vector<AnnotatedExample> parse_annotation_file(const std::string& path);

// Non-throwing variant for report-oriented callers (cmd_validate): returns
// whatever parsed plus every violation found. Records with structural errors
// are still materialized when their fields parse.
struct AnnotationLoad {
  std::vector<AnnotatedExample> records;
  ValidationReport report;
};
AnnotationLoad load_annotations(const std::string& path);

// Canonical serialization (inverse of parse_annotation_file). One record per
// line, fields in schema order, '\n' after every record.
std::string serialize_annotations(const std::vector<AnnotatedExample>& pool);
void write_annotation_file(const std::vector<AnnotatedExample>& pool,
                           const std::string& path);

// Structural validation. Errors reject a record; warnings (annotator control
// flags disagreeing with the containment test) do not.
ValidationReport validate_annotation(const AnnotatedExample& a);

// Full: "<title> - <all sentences space-joined>".
// Supporting: only the supporting-index sentences, original order, no title.
std::string select_context(const Passage& p, ContextMode mode);

}  // namespace reascirc
