#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reascirc/dataset.hpp"
#include "reascirc/metrics.hpp"
#include "reascirc/types.hpp"

namespace reascirc::testfix {

// Synthetic but structurally valid annotations: every record passes
// validate_annotation with zero errors and zero warnings.
enum class BridgeShape {
  OnePassage,      // answer in p1 only           -> T5(p1), T6(p2), T8
  SameEntity,      // answer == bridge, in both   -> T6 x2, no T8
  BothPassages,    // answer in both, != bridge   -> T5 x2, T8
  NeitherPassage,  // answer in neither           -> T6 x2, T8
};

AnnotatedExample make_bridge_example(BridgeShape shape, int serial, Pool pool);
AnnotatedExample make_comparison_example(int serial, Pool pool);

std::vector<AnnotatedExample> make_pool(int train_bridge, int train_comp,
                                        int dev_bridge, int dev_comp);

// 98 + 50 train, 32 + 24 dev.
std::vector<AnnotatedExample> paper_sized_pool();

std::vector<GoldExample> gold_of(const std::vector<AnnotatedExample>& pool,
                                 std::optional<Pool> filter = std::nullopt);

void write_dataset_file(const std::vector<GoldExample>& examples,
                        const std::string& path);

std::string make_temp_dir(const std::string& hint);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};
CommandResult run_command(const std::string& command);

}  // namespace reascirc::testfix

namespace reascirc::oracle {

// Independent reimplementations used as test-side ground truth. Written from
// the metric definitions, not from the library code paths.
std::vector<std::string> tokenize(const std::string& text);

double bleu_reference(const std::vector<EvalPair>& pairs, int n);
double rouge_reference(const EvalPair& pair);
double meteor_reference(const EvalPair& pair);

// Backtracking search over all injective stem-compatible alignments:
// maximum matches, then minimum chunks.
MeteorAlignment meteor_exhaustive(const std::vector<std::string>& hyp_tokens,
                                  const std::vector<std::string>& ref_tokens);

size_t lcs_recursive(const std::vector<std::string>& a,
                     const std::vector<std::string>& b);

// All maximal common contiguous token subsequences by brute-force
// enumeration, ranked by joined length then first position in t1.
std::vector<std::vector<std::string>> maximal_common_substrings(
    const std::vector<std::string>& t1, const std::vector<std::string>& t2);

}  // namespace reascirc::oracle
