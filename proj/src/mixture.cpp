#include "reascirc/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "reascirc/circuit.hpp"
#include "reascirc/entity.hpp"
#include "reascirc/error.hpp"
#include "reascirc/rng.hpp"
#include "reascirc/version.hpp"

namespace reascirc {

using nlohmann::ordered_json;

namespace {

TaskInstance make_instance(TaskId task, const std::string& example_id,
                           std::optional<int> passage_index, SlotMap slots,
                           std::vector<std::string> outputs,
                           const SentinelConfig& sentinels) {
  TaskInstance inst;
  inst.task = task;
  inst.example_id = example_id;
  inst.passage_index = passage_index;
  inst.input_prompt = render_input(task, slots, sentinels);
  inst.target = render_target(task, outputs, sentinels);
  inst.meta = std::move(slots);
  return inst;
}

struct PoolIndex {
  std::vector<const AnnotatedExample*> train_bridge, train_comp;
  std::vector<const AnnotatedExample*> dev_bridge, dev_comp;
};

PoolIndex index_pool(const std::vector<AnnotatedExample>& pool) {
  PoolIndex idx;
  for (const AnnotatedExample& a : pool) {
    auto& bucket = a.split == Pool::Train
                       ? (a.is_bridge() ? idx.train_bridge : idx.train_comp)
                       : (a.is_bridge() ? idx.dev_bridge : idx.dev_comp);
    bucket.push_back(&a);
  }
  auto by_id = [](const AnnotatedExample* a, const AnnotatedExample* b) {
    return a->example.id < b->example.id;
  };
  std::sort(idx.train_bridge.begin(), idx.train_bridge.end(), by_id);
  std::sort(idx.train_comp.begin(), idx.train_comp.end(), by_id);
  std::sort(idx.dev_bridge.begin(), idx.dev_bridge.end(), by_id);
  std::sort(idx.dev_comp.begin(), idx.dev_comp.end(), by_id);
  return idx;
}

std::vector<AnnotatedExample> take(std::vector<const AnnotatedExample*> bucket,
                                   size_t n, SplitMix64& rng,
                                   const char* what) {
  if (n > bucket.size())
    throw Error(ErrorKind::Capacity,
                std::string("insufficient ") + what + " examples: need " +
                    std::to_string(n) + ", have " +
                    std::to_string(bucket.size()));
  fisher_yates(bucket, rng);
  bucket.resize(n);
  std::sort(bucket.begin(), bucket.end(),
            [](const AnnotatedExample* a, const AnnotatedExample* b) {
              return a->example.id < b->example.id;
            });
  std::vector<AnnotatedExample> out;
  out.reserve(n);
  for (const AnnotatedExample* a : bucket) out.push_back(*a);
  return out;
}

}  // namespace

std::vector<TaskInstance> expand_annotation(const AnnotatedExample& a,
                                            ContextMode mode,
                                            const SentinelConfig& sentinels) {
  const std::string& id = a.example.id;
  const std::string& answer = a.example.input.answer;
  const std::string ctx1 = select_context(a.example.input.p1, mode);
  const std::string ctx2 = select_context(a.example.input.p2, mode);
  const std::string entities = entity_slot_value(ctx1, ctx2);

  std::vector<TaskInstance> out;
  SlotMap pair_slots{{slot::p1, ctx1}, {slot::p2, ctx2}, {slot::answer, answer}};

  if (a.is_bridge()) {
    const BridgeRationale& r = *a.bridge_rationale;
    if (!r.s1 || !r.s2)
      throw Error(ErrorKind::Contract,
                  "expand_annotation requires a validated record: " + id);
    bool same = r.controls.same_a_b == Tri::True;

    out.push_back(make_instance(TaskId::T1, id, std::nullopt, pair_slots,
                                {entities, "bridge"}, sentinels));
    out.push_back(make_instance(TaskId::T2, id, std::nullopt, pair_slots,
                                {entities, r.bridge}, sentinels));
    out.push_back(make_instance(
        TaskId::T3, id, 1, {{slot::answer, answer}, {slot::passage, ctx1}},
        {r.controls.in_a_p1 == Tri::True ? "present" : "absent"}, sentinels));
    out.push_back(make_instance(
        TaskId::T3, id, 2, {{slot::answer, answer}, {slot::passage, ctx2}},
        {r.controls.in_a_p2 == Tri::True ? "present" : "absent"}, sentinels));
    out.push_back(make_instance(
        TaskId::T4, id, std::nullopt,
        {{slot::answer, answer}, {slot::bridge, r.bridge}},
        {same ? "the same" : "different"}, sentinels));

    for (const StatementStep& st : bridge_statement_plan(r.controls)) {
      const std::string& ctx = st.passage_index == 1 ? ctx1 : ctx2;
      const std::string& statement = st.passage_index == 1 ? *r.s1 : *r.s2;
      SlotMap slots{{slot::passage, ctx}, {slot::bridge, r.bridge}};
      if (st.task == TaskId::T5) slots[slot::answer] = answer;
      out.push_back(make_instance(st.task, id, st.passage_index,
                                  std::move(slots), {statement}, sentinels));
    }

    out.push_back(make_instance(TaskId::T7, id, std::nullopt,
                                {{slot::bridge, r.bridge}, {slot::s1, *r.s1},
                                 {slot::s2, *r.s2}},
                                {r.combined}, sentinels));
    std::string contracted = r.combined;
    if (!same) {
      if (!r.combined_minus_bridge)
        throw Error(ErrorKind::Contract,
                    "expand_annotation requires a validated record: " + id);
      out.push_back(make_instance(TaskId::T8, id, std::nullopt,
                                  {{slot::bridge, r.bridge},
                                   {slot::combined, r.combined}},
                                  {*r.combined_minus_bridge}, sentinels));
      contracted = *r.combined_minus_bridge;
    }
    out.push_back(make_instance(
        TaskId::T9, id, std::nullopt,
        {{slot::answer, answer}, {slot::combined_minus_bridge, contracted}},
        {r.combined_minus_bridge_answer}, sentinels));
    out.push_back(make_instance(
        TaskId::T10, id, std::nullopt,
        {{slot::combined_minus_bridge_answer, r.combined_minus_bridge_answer}},
        {r.question}, sentinels));
  } else if (a.comparison_rationale) {
    const ComparisonRationale& r = *a.comparison_rationale;
    out.push_back(make_instance(TaskId::T1, id, std::nullopt, pair_slots,
                                {entities, "comparison"}, sentinels));
    out.push_back(make_instance(TaskId::T11, id, std::nullopt, pair_slots,
                                {r.s1, r.s2}, sentinels));
    out.push_back(make_instance(TaskId::T12, id, std::nullopt,
                                {{slot::s1, r.s1}, {slot::s2, r.s2}},
                                {r.combined}, sentinels));
    out.push_back(make_instance(
        TaskId::T13, id, std::nullopt,
        {{slot::combined, r.combined}, {slot::answer, answer}},
        {r.question}, sentinels));
  } else {
    throw Error(ErrorKind::Contract, "annotation has no rationale: " + id);
  }
  return out;
}

TaskInstance baseline_instance(const AnnotatedExample& a, ContextMode mode,
                               const SentinelConfig& sentinels) {
  const std::string question = !a.example.gold_question.empty()
                                   ? a.example.gold_question
                                   : (a.is_bridge()
                                          ? a.bridge_rationale->question
                                          : a.comparison_rationale->question);
  return make_instance(TaskId::Baseline, a.example.id, std::nullopt,
                       {{slot::p1, select_context(a.example.input.p1, mode)},
                        {slot::p2, select_context(a.example.input.p2, mode)},
                        {slot::answer, a.example.input.answer}},
                       {question}, sentinels);
}

KShotSample sample_kshot(const std::vector<AnnotatedExample>& pool,
                         const MixtureSpec& spec) {
  if (spec.k_train < 1)
    throw Error(ErrorKind::Contract, "k_train must be positive");
  PoolIndex idx = index_pool(pool);
  const size_t k = static_cast<size_t>(spec.k_train);
  const size_t train_total = idx.train_bridge.size() + idx.train_comp.size();

  size_t ratio_bridge =
      static_cast<size_t>(std::llround(0.75 * static_cast<double>(k)));
  size_t train_bridge_n = ratio_bridge;
  size_t train_comp_n = k - ratio_bridge;
  if (k == train_total) {
    // "Use all collected annotations": the 75/25 ratio is waived and the
    // whole train pool goes in.
    train_bridge_n = idx.train_bridge.size();
    train_comp_n = idx.train_comp.size();
  }
  size_t val_bridge_n = std::min<size_t>(ratio_bridge, 32);
  size_t val_comp_n = std::min<size_t>(k - ratio_bridge, 24);

  SplitMix64 rng(spec.seed);
  KShotSample sample;
  auto train_bridge = take(idx.train_bridge, train_bridge_n, rng, "train-pool bridge");
  auto train_comp = take(idx.train_comp, train_comp_n, rng, "train-pool comparison");
  auto val_bridge = take(idx.dev_bridge, val_bridge_n, rng, "dev-pool bridge");
  auto val_comp = take(idx.dev_comp, val_comp_n, rng, "dev-pool comparison");

  auto append = [](std::vector<AnnotatedExample>& dst,
                   std::vector<AnnotatedExample>&& src) {
    for (auto& a : src) dst.push_back(std::move(a));
  };
  append(sample.train, std::move(train_bridge));
  append(sample.train, std::move(train_comp));
  append(sample.val, std::move(val_bridge));
  append(sample.val, std::move(val_comp));

  std::set<std::string> train_ids;
  for (const auto& a : sample.train) train_ids.insert(a.example.id);
  for (const auto& a : sample.val)
    if (train_ids.count(a.example.id))
      throw Error(ErrorKind::Validation,
                  "example id appears in both pools: " + a.example.id);
  return sample;
}

size_t emit_training_file(const std::vector<TaskInstance>& instances,
                          const std::string& path) {
  std::vector<const TaskInstance*> ordered;
  ordered.reserve(instances.size());
  for (const TaskInstance& inst : instances) ordered.push_back(&inst);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const TaskInstance* a, const TaskInstance* b) {
                     if (a->example_id != b->example_id)
                       return a->example_id < b->example_id;
                     if (a->task != b->task) return a->task < b->task;
                     return a->passage_index.value_or(0) <
                            b->passage_index.value_or(0);
                   });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write training file: " + path);
  for (const TaskInstance* inst : ordered) {
    ordered_json obj;
    obj["task"] = to_string(inst->task);
    obj["example_id"] = inst->example_id;
    obj["input"] = inst->input_prompt;
    obj["target"] = inst->target;
    out << obj.dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
  return ordered.size();
}

void write_metadata_sidecar(const MixtureSpec& spec, const KShotSample& sample,
                            const std::string& path) {
  ordered_json obj;
  obj["k"] = spec.k_train;
  obj["seed"] = spec.seed;
  obj["context_mode"] = to_string(spec.context_mode);
  obj["include_baseline"] = spec.include_baseline;
  obj["lr"] = 0.00002;
  obj["schedule"] = {{"epochs", 35},
                     {"min_steps", 5000},
                     {"rule", "whichever is higher"}};
  auto ids_and_counts = [](const std::vector<AnnotatedExample>& pool) {
    ordered_json part;
    size_t bridge = 0;
    std::vector<std::string> ids;
    for (const auto& a : pool) {
      if (a.is_bridge()) ++bridge;
      ids.push_back(a.example.id);
    }
    part["bridge"] = bridge;
    part["comparison"] = pool.size() - bridge;
    part["ids"] = ids;
    return part;
  };
  obj["train"] = ids_and_counts(sample.train);
  obj["val"] = ids_and_counts(sample.val);
  obj["sampler"] = sampler_version();
  obj["version"] = REASCIRC_VERSION_STRING;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write sidecar: " + path);
  out << obj.dump(2) << '\n';
}

std::map<TaskId, size_t> mixture_stats(
    const std::vector<TaskInstance>& instances) {
  std::map<TaskId, size_t> stats;
  for (const TaskInstance& inst : instances) ++stats[inst.task];
  return stats;
}

}  // namespace reascirc
