#include "reascirc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "reascirc/error.hpp"
#include "reascirc/porter.hpp"
#include "reascirc/rng.hpp"
#include "reascirc/text.hpp"
#include "reascirc/version.hpp"

namespace reascirc {

using nlohmann::ordered_json;

namespace {

using TokenList = std::vector<std::string>;

std::map<TokenList, size_t> ngram_counts(const TokenList& tokens, size_t m) {
  std::map<TokenList, size_t> counts;
  if (tokens.size() < m) return counts;
  for (size_t i = 0; i + m <= tokens.size(); ++i)
    ++counts[TokenList(tokens.begin() + i, tokens.begin() + i + m)];
  return counts;
}

size_t lcs_length(const TokenList& a, const TokenList& b) {
  std::vector<std::vector<size_t>> dp(a.size() + 1,
                                      std::vector<size_t>(b.size() + 1, 0));
  for (size_t i = 1; i <= a.size(); ++i)
    for (size_t j = 1; j <= b.size(); ++j)
      dp[i][j] = a[i - 1] == b[j - 1]
                     ? dp[i - 1][j - 1] + 1
                     : std::max(dp[i - 1][j], dp[i][j - 1]);
  return dp[a.size()][b.size()];
}

// --- METEOR alignment ------------------------------------------------------

void stem_classes(const TokenList& hyp, const TokenList& ref,
                  std::vector<int>& hyp_cls, std::vector<int>& ref_cls) {
  std::unordered_map<std::string, int> ids;
  auto classify = [&](const TokenList& tokens, std::vector<int>& out) {
    for (const auto& t : tokens) {
      std::string stem = porter_stem(t);
      auto [it, _] = ids.emplace(stem, static_cast<int>(ids.size()));
      out.push_back(it->second);
    }
  };
  classify(hyp, hyp_cls);
  classify(ref, ref_cls);
}

size_t max_matches(const std::vector<int>& hyp_cls,
                   const std::vector<int>& ref_cls) {
  std::unordered_map<int, size_t> h, r;
  for (int c : hyp_cls) ++h[c];
  for (int c : ref_cls) ++r[c];
  size_t m = 0;
  for (const auto& [cls, count] : h) {
    auto it = r.find(cls);
    if (it != r.end()) m += std::min(count, it->second);
  }
  return m;
}

// Exact minimum-chunk search over maximum alignments. States are
// (hyp index, used-ref mask, ref position that would continue the run).
class ChunkSearch {
 public:
  ChunkSearch(const std::vector<int>& hyp_cls, const std::vector<int>& ref_cls,
              size_t target)
      : hyp_(hyp_cls), ref_(ref_cls), target_(target) {
    std::unordered_map<int, size_t> h, r;
    for (int c : hyp_) ++h[c];
    for (int c : ref_) ++r[c];
    for (const auto& [cls, count] : h) {
      size_t matched = std::min(count, r.count(cls) ? r[cls] : 0);
      skip_[cls] = count - matched;  // hyp tokens of this class left unmatched
    }
  }

  size_t run() {
    best_ = hyp_.size() + 1;
    dfs(0, 0, -1, 0, 0);
    return best_;
  }

 private:
  const std::vector<int>& hyp_;
  const std::vector<int>& ref_;
  size_t target_;
  std::unordered_map<int, size_t> skip_;
  std::unordered_map<uint64_t, size_t> seen_;  // state -> chunks already paid
  size_t best_ = 0;

  void dfs(size_t i, uint32_t mask, int prev, size_t chunks, size_t matched) {
    if (chunks >= best_) return;
    if (matched == target_) {
      best_ = chunks;
      return;
    }
    if (i >= hyp_.size()) return;
    uint64_t key = (static_cast<uint64_t>(i) << 38) |
                   (static_cast<uint64_t>(mask) << 6) |
                   static_cast<uint64_t>(prev + 1);
    auto it = seen_.find(key);
    if (it != seen_.end() && it->second <= chunks) return;
    seen_[key] = chunks;

    int cls = hyp_[i];
    // Continue the open run first: it is never worse than breaking it.
    int cont = prev + 1;
    if (prev >= 0 && cont < static_cast<int>(ref_.size()) &&
        !(mask & (1u << cont)) && ref_[cont] == cls) {
      dfs(i + 1, mask | (1u << cont), cont, chunks, matched + 1);
    }
    for (int j = 0; j < static_cast<int>(ref_.size()); ++j) {
      if (ref_[j] != cls || (mask & (1u << j))) continue;
      if (prev >= 0 && j == cont) continue;  // already tried above
      dfs(i + 1, mask | (1u << j), j, chunks + 1, matched + 1);
    }
    auto sk = skip_.find(cls);
    if (sk != skip_.end() && sk->second > 0) {
      --sk->second;
      dfs(i + 1, mask, prev, chunks, matched);
      ++sk->second;
    }
  }
};

// Capacity-honouring greedy for inputs too large for the exact search.
size_t greedy_chunks(const std::vector<int>& hyp_cls,
                     const std::vector<int>& ref_cls) {
  std::unordered_map<int, size_t> r_count, need;
  for (int c : ref_cls) ++r_count[c];
  std::unordered_map<int, size_t> h_count;
  for (int c : hyp_cls) ++h_count[c];
  for (const auto& [cls, count] : h_count)
    need[cls] = std::min(count, r_count.count(cls) ? r_count[cls] : 0);

  std::vector<bool> used(ref_cls.size(), false);
  size_t chunks = 0;
  int prev = -1;
  for (size_t i = 0; i < hyp_cls.size(); ++i) {
    int cls = hyp_cls[i];
    auto it = need.find(cls);
    if (it == need.end() || it->second == 0) {
      prev = -1;
      continue;
    }
    int chosen = -1;
    int cont = prev + 1;
    if (prev >= 0 && cont < static_cast<int>(ref_cls.size()) && !used[cont] &&
        ref_cls[cont] == cls) {
      chosen = cont;
    } else {
      for (int j = 0; j < static_cast<int>(ref_cls.size()); ++j) {
        if (!used[j] && ref_cls[j] == cls) {
          chosen = j;
          break;
        }
      }
      ++chunks;
    }
    used[chosen] = true;
    --it->second;
    prev = chosen;
  }
  return chunks;
}

std::string csv_quote(const std::string& field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

double bleu(const std::vector<EvalPair>& pairs, int n) {
  if (pairs.empty())
    throw Error(ErrorKind::Contract, "bleu requires at least one pair");
  if (n < 1 || n > 4)
    throw Error(ErrorKind::Contract, "bleu order must be in 1..4");

  std::vector<size_t> matched(n, 0), total(n, 0);
  size_t hyp_len = 0, ref_len = 0;
  for (const EvalPair& pair : pairs) {
    TokenList hyp = eval_tokenize(pair.hypothesis);
    TokenList ref = eval_tokenize(pair.reference);
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (int m = 1; m <= n; ++m) {
      auto hyp_counts = ngram_counts(hyp, m);
      auto ref_counts = ngram_counts(ref, m);
      for (const auto& [gram, count] : hyp_counts) {
        total[m - 1] += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end())
          matched[m - 1] += std::min(count, it->second);
      }
    }
  }
  double log_sum = 0;
  for (int m = 0; m < n; ++m) {
    if (matched[m] == 0 || total[m] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched[m]) / total[m]);
  }
  double bp = 1.0;
  if (hyp_len == 0) return 0.0;
  if (hyp_len < ref_len)
    bp = std::exp(1.0 - static_cast<double>(ref_len) / hyp_len);
  return bp * std::exp(log_sum / n);
}

double rouge_l(const EvalPair& pair) {
  TokenList hyp = eval_tokenize(pair.hypothesis);
  TokenList ref = eval_tokenize(pair.reference);
  if (hyp.empty() || ref.empty()) return 0.0;
  size_t lcs = lcs_length(hyp, ref);
  if (lcs == 0) return 0.0;
  double p = static_cast<double>(lcs) / hyp.size();
  double r = static_cast<double>(lcs) / ref.size();
  constexpr double beta2 = 1.2 * 1.2;
  return (1.0 + beta2) * p * r / (r + beta2 * p);
}

double rouge_l_corpus(const std::vector<EvalPair>& pairs) {
  if (pairs.empty())
    throw Error(ErrorKind::Contract, "rouge_l requires at least one pair");
  double sum = 0;
  for (const auto& pair : pairs) sum += rouge_l(pair);
  return sum / pairs.size();
}

MeteorAlignment meteor_align(const std::vector<std::string>& hyp_tokens,
                             const std::vector<std::string>& ref_tokens) {
  MeteorAlignment out;
  if (hyp_tokens.empty() || ref_tokens.empty()) return out;
  if (hyp_tokens == ref_tokens) return {hyp_tokens.size(), 1};

  std::vector<int> hyp_cls, ref_cls;
  stem_classes(hyp_tokens, ref_tokens, hyp_cls, ref_cls);
  out.matches = max_matches(hyp_cls, ref_cls);
  if (out.matches == 0) return out;

  if (hyp_cls.size() <= 16 && ref_cls.size() <= 16) {
    out.chunks = ChunkSearch(hyp_cls, ref_cls, out.matches).run();
  } else {
    out.chunks = greedy_chunks(hyp_cls, ref_cls);
  }
  return out;
}

double meteor_lite(const EvalPair& pair) {
  TokenList hyp = eval_tokenize(pair.hypothesis);
  TokenList ref = eval_tokenize(pair.reference);
  MeteorAlignment a = meteor_align(hyp, ref);
  if (a.matches == 0) return 0.0;
  double m = static_cast<double>(a.matches);
  double p = m / hyp.size();
  double r = m / ref.size();
  double fmean = 10.0 * p * r / (r + 9.0 * p);
  double frag = static_cast<double>(a.chunks) / m;
  double penalty = 0.5 * frag * frag * frag;
  return fmean * (1.0 - penalty);
}

double meteor_lite_corpus(const std::vector<EvalPair>& pairs) {
  if (pairs.empty())
    throw Error(ErrorKind::Contract, "meteor requires at least one pair");
  double sum = 0;
  for (const auto& pair : pairs) sum += meteor_lite(pair);
  return sum / pairs.size();
}

MetricReport evaluate_run(const std::vector<EvalPair>& pairs) {
  if (pairs.empty())
    throw Error(ErrorKind::Contract, "evaluate_run requires at least one pair");
  for (const auto& pair : pairs)
    if (trim(pair.reference).empty())
      throw Error(ErrorKind::Contract,
                  "pair \"" + pair.id + "\" has an empty reference");
  MetricReport report;
  report.n = pairs.size();
  report.bleu1 = bleu(pairs, 1);
  report.bleu2 = bleu(pairs, 2);
  report.bleu3 = bleu(pairs, 3);
  report.bleu4 = bleu(pairs, 4);
  report.meteor = meteor_lite_corpus(pairs);
  report.rouge_l = rouge_l_corpus(pairs);
  report.selection_score =
      (report.bleu1 + report.bleu2 + report.bleu3 + report.bleu4 +
       report.meteor + report.rouge_l) /
      6.0;
  return report;
}

std::string MetricReport::to_json() const {
  ordered_json obj;
  obj["bleu1"] = bleu1;
  obj["bleu2"] = bleu2;
  obj["bleu3"] = bleu3;
  obj["bleu4"] = bleu4;
  obj["meteor"] = meteor;
  obj["rouge_l"] = rouge_l;
  obj["selection_score"] = selection_score;
  obj["n"] = n;
  obj["version"] = REASCIRC_VERSION_STRING;
  return obj.dump(2);
}

PredictionsLoad read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open predictions file: " + path);
  PredictionsLoad out;
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
    EvalPair pair;
    if (obj.contains("id") && obj["id"].is_string())
      pair.id = obj["id"].get<std::string>();
    if (obj.contains("reference") && obj["reference"].is_string())
      pair.reference = obj["reference"].get<std::string>();
    bool has_hyp = obj.contains("hypothesis") && obj["hypothesis"].is_string();
    if (has_hyp) pair.hypothesis = obj["hypothesis"].get<std::string>();
    if (trim(pair.reference).empty() || !has_hyp) {
      ++out.skipped;
      continue;
    }
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_prediction_questions(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open predictions file: " + path);
  std::vector<std::pair<std::string, std::string>> out;
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
    std::string id = obj.contains("id") && obj["id"].is_string()
                         ? obj["id"].get<std::string>()
                         : "line-" + std::to_string(line_no);
    if (obj.contains("hypothesis") && obj["hypothesis"].is_string())
      out.emplace_back(id, obj["hypothesis"].get<std::string>());
  }
  return out;
}

void write_report(const MetricReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write report: " + path);
  out << report.to_json() << '\n';
}

size_t export_human_eval_sheet(const std::vector<SheetRow>& rows, size_t n,
                               uint64_t seed, const std::string& path) {
  if (n > rows.size())
    throw Error(ErrorKind::Contract,
                "requested " + std::to_string(n) + " rows but only " +
                    std::to_string(rows.size()) + " questions available");
  std::vector<size_t> order(rows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (rows[a].id != rows[b].id) return rows[a].id < rows[b].id;
    return a < b;
  });
  SplitMix64 rng(seed);
  fisher_yates(order, rng);
  order.resize(n);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (rows[a].id != rows[b].id) return rows[a].id < rows[b].id;
    return a < b;
  });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write sheet: " + path);
  const char* headers[] = {"id",        "p1",          "p2",
                           "answer",    "question",    "multi_hop",
                           "well_formed", "answerable", "answer_matching"};
  for (size_t i = 0; i < std::size(headers); ++i)
    out << (i ? "," : "") << csv_quote(headers[i]);
  out << '\n';
  for (size_t idx : order) {
    const SheetRow& row = rows[idx];
    out << csv_quote(row.id) << ',' << csv_quote(row.p1) << ','
        << csv_quote(row.p2) << ',' << csv_quote(row.answer) << ','
        << csv_quote(row.question) << ",\"\",\"\",\"\",\"\"\n";
  }
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
  return n;
}

}  // namespace reascirc
