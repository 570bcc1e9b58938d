#include "reascirc/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "reascirc/error.hpp"

namespace reascirc {

using nlohmann::ordered_json;

namespace {

std::string sanitize_filename(const std::string& id) {
  std::string out;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

struct Outcome {
  bool ok = false;
  CircuitTrace trace;
  std::string error;
};

}  // namespace

std::string RunSummary::to_json() const {
  ordered_json obj;
  obj["total"] = total;
  obj["succeeded"] = succeeded;
  obj["failed"] = failures.size();
  ordered_json arr = ordered_json::array();
  for (const RunFailure& f : failures)
    arr.push_back({{"id", f.id}, {"error", f.error}});
  obj["failures"] = std::move(arr);
  return obj.dump(2);
}

RunSummary run_dataset(const std::vector<GoldExample>& examples,
                       Backend& backend, const RunOptions& options) {
  if (options.jobs < 1)
    throw Error(ErrorKind::Config, "jobs must be at least 1");

  std::vector<Outcome> outcomes(examples.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= examples.size()) return;
      Outcome& slot = outcomes[i];
      try {
        slot.trace = run_circuit(examples[i], backend, options.config);
        slot.ok = true;
      } catch (const RunError& e) {
        slot.trace = e.partial_trace();
        slot.error = e.what();
      } catch (const Error& e) {
        slot.trace.input_id = examples[i].id;
        slot.error = e.what();
      }
    }
  };
  size_t n_threads =
      std::min<size_t>(static_cast<size_t>(options.jobs), examples.size());
  std::vector<std::thread> threads;
  for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();

  // Emission order: example id, independent of worker scheduling.
  std::vector<size_t> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (examples[a].id != examples[b].id) return examples[a].id < examples[b].id;
    return a < b;
  });

  if (!options.traces_dir.empty())
    std::filesystem::create_directories(options.traces_dir);

  std::ofstream predictions;
  if (!options.predictions_path.empty()) {
    predictions.open(options.predictions_path, std::ios::binary);
    if (!predictions)
      throw Error(ErrorKind::Io,
                  "cannot write predictions: " + options.predictions_path);
  }

  RunSummary summary;
  summary.total = examples.size();
  for (size_t i : order) {
    const GoldExample& example = examples[i];
    const Outcome& outcome = outcomes[i];

    if (!options.traces_dir.empty()) {
      ordered_json obj = ordered_json::parse(outcome.trace.to_json());
      if (!outcome.ok) obj["error"] = outcome.error;
      std::string path = options.traces_dir + "/" +
                         sanitize_filename(example.id) + ".json";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(ErrorKind::Io, "cannot write trace: " + path);
      out << obj.dump(2) << '\n';
    }

    if (outcome.ok) {
      ++summary.succeeded;
      if (predictions.is_open()) {
        ordered_json line;
        line["id"] = example.id;
        line["reference"] = example.gold_question;
        line["q_type"] = to_string(outcome.trace.controls.q_type);
        line["hypothesis"] = outcome.trace.questions.empty()
                                 ? ""
                                 : outcome.trace.questions.front().text;
        if (outcome.trace.questions.size() > 1) {
          ordered_json arr = ordered_json::array();
          for (const GeneratedQuestion& q : outcome.trace.questions)
            arr.push_back({{"q_type", to_string(q.type)}, {"text", q.text}});
          line["hypotheses"] = std::move(arr);
        }
        predictions << line.dump() << '\n';
      }
    } else {
      summary.failures.push_back({example.id, outcome.error});
    }
  }
  return summary;
}

}  // namespace reascirc
