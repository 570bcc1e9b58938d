#pragma once

#include <set>
#include <string>
#include <vector>

namespace reascirc {

enum class CandidateSource { Lcs, CapitalizedRun };

struct EntityCandidate {
  std::vector<std::string> tokens;
  size_t char_length = 0;  // length of the space-joined surface form
  CandidateSource source = CandidateSource::Lcs;

  std::string surface() const;
};

using StopwordSet = std::set<std::string>;

// Built-in function-word list (~150 entries, lowercase).
const StopwordSet& default_stopwords();

// One word per line, UTF-8; blank lines skipped.
StopwordSet load_stopwords(const std::string& path);

// Maximal contiguous token subsequences occurring in both inputs, plus
// capitalized runs of t1 that recur in t2. Ranked by char_length descending,
// ties broken by earlier first occurrence in t1. No filtering, no cap.
std::vector<EntityCandidate> common_spans_raw(
    const std::vector<std::string>& t1, const std::vector<std::string>& t2);

// Drops stopwords and lowercase-initial tokens inside each candidate
// (numerics survive next to a capitalized token), splits what remains into
// one candidate per run, dedupes, re-ranks.
std::vector<EntityCandidate> filter_candidates(
    const std::vector<EntityCandidate>& candidates, const StopwordSet& stopwords,
    const std::vector<std::string>& t1);

// Full pipeline: raw spans, filter, top k.
std::vector<EntityCandidate> common_spans(
    const std::vector<std::string>& t1, const std::vector<std::string>& t2,
    size_t k, const StopwordSet& stopwords = default_stopwords());

// "Common entities found" slot value: top-k surfaces joined by ", ";
// "none" when nothing survives.
std::string entity_slot_value(const std::string& context1,
                              const std::string& context2, size_t k = 3,
                              const StopwordSet& stopwords = default_stopwords());

}  // namespace reascirc
