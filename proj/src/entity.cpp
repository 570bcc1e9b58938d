#include "reascirc/entity.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "reascirc/error.hpp"
#include "reascirc/text.hpp"

namespace reascirc {

namespace {

// clang-format off
const char* kDefaultStopwords[] = {
    "a", "an", "the", "and", "or", "but", "nor", "so", "yet", "for",
    "of", "in", "on", "at", "by", "to", "from", "with", "without", "about",
    "against", "between", "among", "through", "during", "before", "after",
    "above", "below", "under", "over", "into", "onto", "off", "out", "up",
    "down", "near", "since", "until", "upon", "within", "across", "along",
    "around", "behind", "beside", "besides", "beyond", "despite", "except",
    "inside", "outside", "toward", "towards", "underneath", "via", "per",
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us",
    "them", "my", "your", "his", "its", "our", "their", "mine", "yours",
    "hers", "ours", "theirs", "this", "that", "these", "those", "who",
    "whom", "whose", "which", "what", "where", "when", "why", "how",
    "is", "am", "are", "was", "were", "be", "been", "being", "do", "does",
    "did", "done", "have", "has", "had", "having", "will", "would", "shall",
    "should", "can", "could", "may", "might", "must", "ought", "not", "no",
    "nor", "only", "own", "same", "such", "than", "then", "there", "here",
    "all", "any", "both", "each", "few", "more", "most", "other", "some",
    "as", "if", "because", "while", "although", "though", "whether",
    "either", "neither", "also", "too", "very", "just", "even", "once",
    "again", "further", "ever", "never", "now", "still", "however", "both",
};
// clang-format on

bool starts_uppercase(const std::string& token) {
  return !token.empty() &&
         std::isupper(static_cast<unsigned char>(token[0])) != 0;
}

bool starts_digit(const std::string& token) {
  return !token.empty() &&
         std::isdigit(static_cast<unsigned char>(token[0])) != 0;
}

// First index where `needle` occurs contiguously in `hay`, or npos.
size_t find_subsequence(const std::vector<std::string>& hay,
                        const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return std::string::npos;
  auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end());
  if (it == hay.end()) return std::string::npos;
  return static_cast<size_t>(it - hay.begin());
}

size_t joined_length(const std::vector<std::string>& tokens) {
  size_t n = tokens.empty() ? 0 : tokens.size() - 1;
  for (const auto& t : tokens) n += t.size();
  return n;
}

struct Ranked {
  EntityCandidate cand;
  size_t first_pos;  // first occurrence in t1
};

void rank(std::vector<Ranked>& items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const Ranked& a, const Ranked& b) {
                     if (a.cand.char_length != b.cand.char_length)
                       return a.cand.char_length > b.cand.char_length;
                     return a.first_pos < b.first_pos;
                   });
}

std::vector<EntityCandidate> strip_rank(std::vector<Ranked> items) {
  std::vector<EntityCandidate> out;
  out.reserve(items.size());
  for (auto& r : items) out.push_back(std::move(r.cand));
  return out;
}

}  // namespace

std::string EntityCandidate::surface() const { return join(tokens); }

const StopwordSet& default_stopwords() {
  static const StopwordSet set = [] {
    StopwordSet s;
    for (const char* w : kDefaultStopwords) s.insert(w);
    return s;
  }();
  return set;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open stopword file: " + path);
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = trim(line);
    if (!w.empty()) set.insert(ascii_lower(w));
  }
  return set;
}

std::vector<EntityCandidate> common_spans_raw(
    const std::vector<std::string>& t1, const std::vector<std::string>& t2) {
  const size_t n = t1.size();
  const size_t m = t2.size();
  std::vector<Ranked> found;
  std::vector<std::vector<std::string>> seen;

  auto add = [&](std::vector<std::string> tokens, CandidateSource source) {
    if (tokens.empty()) return;
    if (std::find(seen.begin(), seen.end(), tokens) != seen.end()) return;
    seen.push_back(tokens);
    size_t pos = find_subsequence(t1, tokens);
    EntityCandidate c;
    c.char_length = joined_length(tokens);
    c.tokens = std::move(tokens);
    c.source = source;
    found.push_back({std::move(c), pos});
  };

  if (n && m) {
    // match[i][j]: length of the common run ending at t1[i-1], t2[j-1].
    std::vector<std::vector<size_t>> match(n + 1,
                                           std::vector<size_t>(m + 1, 0));
    std::vector<Ranked> spans;
    for (size_t i = 1; i <= n; ++i) {
      for (size_t j = 1; j <= m; ++j) {
        if (t1[i - 1] != t2[j - 1]) continue;
        match[i][j] = match[i - 1][j - 1] + 1;
        bool extends = i < n && j < m && t1[i] == t2[j];
        if (!extends) {
          size_t len = match[i][j];
          std::vector<std::string> tokens(t1.begin() + (i - len),
                                          t1.begin() + i);
          spans.push_back({{std::move(tokens), 0, CandidateSource::Lcs}, 0});
        }
      }
    }
    // Keep only maximal sequences: drop spans contained in a longer span.
    for (auto& s : spans) {
      bool contained = false;
      for (const auto& other : spans) {
        if (other.cand.tokens.size() > s.cand.tokens.size() &&
            contains_subsequence(other.cand.tokens, s.cand.tokens)) {
          contained = true;
          break;
        }
      }
      if (!contained) add(s.cand.tokens, CandidateSource::Lcs);
    }
  }

  // NER stand-in: capitalized runs of t1 that recur verbatim in t2.
  size_t i = 0;
  while (i < n) {
    if (!starts_uppercase(t1[i])) {
      ++i;
      continue;
    }
    size_t j = i + 1;
    while (j < n && (starts_uppercase(t1[j]) ||
                     (starts_digit(t1[j]) && starts_uppercase(t1[j - 1]))))
      ++j;
    std::vector<std::string> run(t1.begin() + i, t1.begin() + j);
    if (find_subsequence(t2, run) != std::string::npos)
      add(std::move(run), CandidateSource::CapitalizedRun);
    i = j;
  }

  rank(found);
  return strip_rank(std::move(found));
}

std::vector<EntityCandidate> filter_candidates(
    const std::vector<EntityCandidate>& candidates, const StopwordSet& stopwords,
    const std::vector<std::string>& t1) {
  std::vector<Ranked> out;
  std::vector<std::vector<std::string>> seen;

  for (const EntityCandidate& cand : candidates) {
    const auto& toks = cand.tokens;
    std::vector<bool> keep(toks.size(), false);
    for (size_t i = 0; i < toks.size(); ++i) {
      if (stopwords.count(ascii_lower(toks[i]))) continue;
      if (starts_uppercase(toks[i])) keep[i] = true;
    }
    // Numerics ride along with a capitalized neighbour ("March 18");
    // standalone numbers are common-noun territory and get dropped.
    for (size_t i = 0; i < toks.size(); ++i) {
      if (!starts_digit(toks[i])) continue;
      bool prev_cap = i > 0 && keep[i - 1] && starts_uppercase(toks[i - 1]);
      bool next_cap =
          i + 1 < toks.size() && starts_uppercase(toks[i + 1]) &&
          !stopwords.count(ascii_lower(toks[i + 1]));
      if (prev_cap || next_cap) keep[i] = true;
    }
    size_t i = 0;
    while (i < toks.size()) {
      if (!keep[i]) {
        ++i;
        continue;
      }
      size_t j = i;
      while (j < toks.size() && keep[j]) ++j;
      std::vector<std::string> run(toks.begin() + i, toks.begin() + j);
      if (std::find(seen.begin(), seen.end(), run) == seen.end()) {
        seen.push_back(run);
        EntityCandidate c;
        c.char_length = joined_length(run);
        c.tokens = run;
        c.source = cand.source;
        out.push_back({std::move(c), find_subsequence(t1, run)});
      }
      i = j;
    }
  }
  rank(out);
  return strip_rank(std::move(out));
}

std::vector<EntityCandidate> common_spans(
    const std::vector<std::string>& t1, const std::vector<std::string>& t2,
    size_t k, const StopwordSet& stopwords) {
  if (k < 1) throw Error(ErrorKind::Contract, "common_spans requires k >= 1");
  std::vector<EntityCandidate> raw = common_spans_raw(t1, t2);
  std::vector<EntityCandidate> filtered = filter_candidates(raw, stopwords, t1);
  if (filtered.size() > k) filtered.resize(k);
  return filtered;
}

std::string entity_slot_value(const std::string& context1,
                              const std::string& context2, size_t k,
                              const StopwordSet& stopwords) {
  auto cands = common_spans(whitespace_tokenize(context1),
                            whitespace_tokenize(context2), k, stopwords);
  if (cands.empty()) return "none";
  std::vector<std::string> surfaces;
  surfaces.reserve(cands.size());
  for (const auto& c : cands) surfaces.push_back(c.surface());
  return join(surfaces, ", ");
}

}  // namespace reascirc
