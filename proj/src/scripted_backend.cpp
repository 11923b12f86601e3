#include "rtrim/scripted_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rtrim/errors.hpp"
#include "rtrim/extraction.hpp"

namespace rtrim {

namespace {

using nlohmann::json;

// Deterministic, platform-independent uniform stream.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t out = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

  // Uniform in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

std::string kind_name(PromptKind k) {
  return k == PromptKind::solve ? "solve" : "prune";
}

std::string group_key(const std::string& qid, PromptKind kind,
                      std::optional<int> iteration, int tau_lo, int tau_hi) {
  std::ostringstream key;
  key << qid << "\x1f" << kind_name(kind) << "\x1f"
      << (iteration ? std::to_string(*iteration) : "any") << "\x1f" << tau_lo
      << ":" << tau_hi;
  return key.str();
}

ScenarioRow row_from_json(const json& j, size_t line_no) {
  static const std::vector<std::string> known = {
      "question_id", "tau_lo", "tau_hi",       "answer",
      "prob",        "length_mean", "length_spread", "kind",
      "iteration"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw DataError("scenario line " + std::to_string(line_no) +
                      ": unknown field '" + it.key() + "'");
  }
  ScenarioRow row;
  try {
    row.question_id = j.at("question_id").get<std::string>();
    row.tau_lo = j.at("tau_lo").get<int>();
    row.tau_hi = j.at("tau_hi").get<int>();
    row.answer = j.at("answer").get<std::string>();
    row.prob = j.at("prob").get<double>();
    row.length_mean = j.at("length_mean").get<double>();
    row.length_spread = j.at("length_spread").get<double>();
    if (j.contains("kind")) {
      std::string k = j.at("kind").get<std::string>();
      if (k == "solve") row.kind = PromptKind::solve;
      else if (k == "prune") row.kind = PromptKind::prune;
      else throw DataError("scenario line " + std::to_string(line_no) +
                           ": kind must be solve or prune");
    }
    if (j.contains("iteration")) row.iteration = j.at("iteration").get<int>();
  } catch (const json::exception& e) {
    throw DataError("scenario line " + std::to_string(line_no) + ": " + e.what());
  }
  return row;
}

json row_to_json(const ScenarioRow& row) {
  json j;
  j["question_id"] = row.question_id;
  j["tau_lo"] = row.tau_lo;
  j["tau_hi"] = row.tau_hi;
  j["answer"] = row.answer;
  j["prob"] = row.prob;
  j["length_mean"] = row.length_mean;
  j["length_spread"] = row.length_spread;
  if (row.kind != PromptKind::solve) j["kind"] = kind_name(row.kind);
  if (row.iteration) j["iteration"] = *row.iteration;
  return j;
}

}  // namespace

ScriptedScenario ScriptedScenario::from_rows(std::vector<ScenarioRow> rows) {
  ScriptedScenario s;
  s.rows_ = std::move(rows);
  s.index_and_validate();
  return s;
}

ScriptedScenario ScriptedScenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scenario file '" + path + "'");
  std::vector<ScenarioRow> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("scenario line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(row_from_json(j, line_no));
  }
  if (rows.empty()) throw DataError("scenario file '" + path + "' has no rows");
  return from_rows(std::move(rows));
}

void ScriptedScenario::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write scenario file '" + path + "'");
  out << to_jsonl();
}

std::string ScriptedScenario::to_jsonl() const {
  std::ostringstream out;
  for (const auto& row : rows_) out << row_to_json(row).dump() << "\n";
  return out.str();
}

void ScriptedScenario::index_and_validate() {
  groups_.clear();
  for (const auto& row : rows_) {
    if (row.question_id.empty()) throw DataError("scenario row with empty question_id");
    if (row.tau_lo < 0 || row.tau_hi < row.tau_lo)
      throw DataError("scenario row with invalid tau range");
    if ((row.tau_lo == 0) != (row.tau_hi == 0))
      throw DataError("tau range 0 is reserved for the unconstrained prompt");
    if (row.prob < 0.0) throw DataError("scenario row with negative prob");
    if (row.length_mean < 1.0) throw DataError("scenario row length_mean must be >= 1");
    if (row.length_spread < 0.0) throw DataError("scenario row length_spread must be >= 0");
    groups_[group_key(row.question_id, row.kind, row.iteration, row.tau_lo, row.tau_hi)]
        .push_back(&row);
  }

  // Per-group probabilities must form a distribution.
  for (const auto& [key, rows] : groups_) {
    double total = 0.0;
    for (const ScenarioRow* r : rows) total += r->prob;
    if (std::abs(total - 1.0) > 1e-6)
      throw DataError("scenario group probabilities sum to " + std::to_string(total) +
                      ", expected 1");
  }

  // Constrained ranges under the same (question, kind, iteration) must not
  // partially overlap; identical ranges already share a group.
  std::map<std::string, std::vector<std::pair<int, int>>> ranges;
  for (const auto& row : rows_) {
    if (row.tau_lo == 0) continue;
    std::ostringstream cls;
    cls << row.question_id << "\x1f" << kind_name(row.kind) << "\x1f"
        << (row.iteration ? std::to_string(*row.iteration) : "any");
    ranges[cls.str()].push_back({row.tau_lo, row.tau_hi});
  }
  for (auto& [cls, spans] : ranges) {
    std::sort(spans.begin(), spans.end());
    spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
    for (size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first <= spans[i - 1].second)
        throw DataError("scenario tau ranges overlap for one question");
    }
  }
}

const std::vector<const ScenarioRow*>* ScriptedScenario::find_group(
    const std::string& question_id, std::optional<int> tau, PromptKind kind,
    int iteration) const {
  for (const std::string& qid : {question_id, std::string("*")}) {
    for (bool iteration_specific : {true, false}) {
      std::optional<int> iter_key;
      if (iteration_specific) iter_key = iteration;
      if (tau) {
        // Scan candidate ranges containing tau.
        for (const auto& [key, rows] : groups_) {
          const ScenarioRow* head = rows.front();
          if (head->question_id != qid) continue;
          if (head->kind != kind) continue;
          if (head->iteration != iter_key) continue;
          if (head->tau_lo == 0) continue;
          if (head->tau_lo <= *tau && *tau <= head->tau_hi) return &rows;
        }
      } else {
        auto it = groups_.find(group_key(qid, kind, iter_key, 0, 0));
        if (it != groups_.end()) return &it->second;
      }
    }
  }
  return nullptr;
}

ScriptedBackend::ScriptedBackend(ScriptedScenario scenario, std::string label)
    : scenario_(std::move(scenario)), label_(std::move(label)) {}

std::string ScriptedBackend::describe() const { return "scripted:" + label_; }

std::vector<Completion> ScriptedBackend::sample(const PromptRequest& request) {
  if (request.n < 1 || static_cast<size_t>(request.n) != request.seeds.size())
    throw BackendError("request n must match the number of seeds");
  std::vector<Completion> out;
  out.reserve(request.n);
  for (std::uint64_t seed : request.seeds) out.push_back(sample_one(request, seed));
  return out;
}

namespace {

std::string synth_text(const std::string& answer, int token_count,
                       std::uint64_t seed, bool truncated) {
  std::ostringstream text;
  int lines = std::clamp(token_count / 60, 1, 12);
  for (int i = 1; i <= lines; ++i) {
    text << "Step " << i << ": intermediate derivation " << std::hex
         << mix64(seed + static_cast<std::uint64_t>(i)) << std::dec << ".\n";
  }
  if (!truncated && !answer.empty())
    text << "Final Answer: \\boxed{" << answer << "}";
  return text.str();
}

}  // namespace

Completion ScriptedBackend::sample_one(const PromptRequest& request,
                                       std::uint64_t seed) const {
  const auto* group = scenario_.find_group(request.question_id, request.tau,
                                           request.kind, request.iteration);

  std::string answer;
  double mean = 0.0;
  double spread = 0.0;
  StreamRng rng(seed);

  if (group == nullptr) {
    if (request.kind != PromptKind::prune)
      throw DataError("no scenario row for question '" + request.question_id +
                      "' at tau " +
                      (request.tau ? std::to_string(*request.tau) : "unconstrained"));
    // Built-in prune behavior: keep the boxed answer from the embedded
    // solution and shrink the unconstrained length.
    if (auto boxed = extract_answer(request.user_text)) answer = *boxed;
    mean = 120.0;
    const auto* unconstrained = scenario_.find_group(
        request.question_id, std::nullopt, PromptKind::solve, request.iteration);
    if (unconstrained != nullptr) {
      double expected = 0.0;
      for (const ScenarioRow* r : *unconstrained) expected += r->prob * r->length_mean;
      mean = expected;
    }
    mean = std::max(1.0, 0.8 * mean);
    spread = mean * 0.05;
  } else {
    double u = rng.next_unit();
    double cumulative = 0.0;
    const ScenarioRow* chosen = group->back();
    for (const ScenarioRow* r : *group) {
      cumulative += r->prob;
      if (u < cumulative) {
        chosen = r;
        break;
      }
    }
    answer = chosen->answer;
    mean = chosen->length_mean;
    spread = chosen->length_spread;
  }

  double jitter = 2.0 * rng.next_unit() - 1.0;
  int token_count =
      std::max(1, static_cast<int>(std::lround(mean + spread * jitter)));
  bool truncated = token_count >= request.max_tokens;
  if (truncated) token_count = request.max_tokens;

  Completion c;
  c.token_count = token_count;
  c.finish_reason =
      truncated ? Completion::FinishReason::length : Completion::FinishReason::stop;
  c.text = synth_text(answer, token_count, seed, truncated);
  return c;
}

}  // namespace rtrim
