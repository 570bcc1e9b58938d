#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reascirc/dataset.hpp"
#include "reascirc/prompts.hpp"
#include "reascirc/types.hpp"

namespace reascirc {

struct TaskInstance {
  TaskId task = TaskId::T1;
  std::string example_id;
  std::optional<int> passage_index;
  std::string input_prompt;
  std::string target;
  SlotMap meta;  // slot values the prompt and target were built from
};

struct MixtureSpec {
  int k_train = 8;
  uint64_t seed = 0;
  ContextMode context_mode = ContextMode::Full;
  bool include_baseline = false;
};

// One training record per routed task: 11 for a bridge annotation with
// distinct bridge/answer, 10 when same_a_b (no T8, no T5), 4 for comparison.
// The record must already pass validate_annotation.
std::vector<TaskInstance> expand_annotation(const AnnotatedExample& a,
                                            ContextMode mode,
                                            const SentinelConfig& sentinels = {});

// Plain prompt-to-question record for rationale-free comparison runs. Target
// is the gold question (the rationale question when no gold one exists).
TaskInstance baseline_instance(const AnnotatedExample& a, ContextMode mode,
                               const SentinelConfig& sentinels = {});

struct KShotSample {
  std::vector<AnnotatedExample> train;
  std::vector<AnnotatedExample> val;
};

// 75/25 bridge/comparison split of k_train from the train pool, validation
// mirrored from the dev pool with per-type caps of 32 bridge and
// 24 comparison. k equal to the whole train pool takes everything.
// Deterministic in seed (sorted-id shuffle).
KShotSample sample_kshot(const std::vector<AnnotatedExample>& pool,
                         const MixtureSpec& spec);

// JSON lines {task, example_id, input, target}, stable-sorted by
// (example_id, task, passage_index). Returns records written.
size_t emit_training_file(const std::vector<TaskInstance>& instances,
                          const std::string& path);

// Sidecar JSON: sampling parameters plus the training schedule downstream
// trainers need (constant lr 2e-5, 35 epochs or 5000 steps, whichever is
// higher).
void write_metadata_sidecar(const MixtureSpec& spec,
                            const KShotSample& sample, const std::string& path);

std::map<TaskId, size_t> mixture_stats(
    const std::vector<TaskInstance>& instances);

}  // namespace reascirc
