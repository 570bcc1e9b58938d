#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace reascirc {

struct EvalPair {
  std::string id;
  std::string reference;
  std::string hypothesis;
};

struct MetricReport {
  double bleu1 = 0, bleu2 = 0, bleu3 = 0, bleu4 = 0;
  double meteor = 0;
  double rouge_l = 0;
  double selection_score = 0;  // mean of the six values above
  size_t n = 0;

  std::string to_json() const;
};

// Corpus BLEU-n: clipped modified precisions, uniform weights, brevity
// penalty exp(1 - r/c) for c < r. Any zero precision zeroes the score.
double bleu(const std::vector<EvalPair>& pairs, int n);

// Sentence-level LCS F-score (beta = 1.2).
double rouge_l(const EvalPair& pair);
// Mean of rouge_l over pairs.
double rouge_l_corpus(const std::vector<EvalPair>& pairs);

struct MeteorAlignment {
  size_t matches = 0;
  size_t chunks = 0;
};

// Unigram alignment: exact match, then Porter-stem match, each token used at
// most once. Chunk count is the minimum number of contiguous runs over the
// maximum-match alignments (exact search up to 16 tokens a side, greedy
// beyond).
MeteorAlignment meteor_align(const std::vector<std::string>& hyp_tokens,
                             const std::vector<std::string>& ref_tokens);

// Fmean = 10PR / (R + 9P); penalty = 0.5 (chunks/matches)^3.
double meteor_lite(const EvalPair& pair);
double meteor_lite_corpus(const std::vector<EvalPair>& pairs);

// All six metrics plus their mean. Pairs must be non-empty and references
// non-empty.
MetricReport evaluate_run(const std::vector<EvalPair>& pairs);

// Predictions file: JSON lines {id, reference, hypothesis}.
struct PredictionsLoad {
  std::vector<EvalPair> pairs;
  size_t skipped = 0;  // lines lacking a usable reference/hypothesis
};
PredictionsLoad read_predictions(const std::string& path);

// id/hypothesis pairs regardless of reference presence (sheet export input).
std::vector<std::pair<std::string, std::string>> read_prediction_questions(
    const std::string& path);

void write_report(const MetricReport& report, const std::string& path);

// One generated question with enough context for a human judge.
struct SheetRow {
  std::string id;
  std::string p1;
  std::string p2;
  std::string answer;
  std::string question;
};

// CSV sheet with blank annotation columns
// (multi_hop, well_formed, answerable, answer_matching).
// Samples n rows without replacement, deterministic in seed.
size_t export_human_eval_sheet(const std::vector<SheetRow>& rows, size_t n,
                               uint64_t seed, const std::string& path);

}  // namespace reascirc
