#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtrim/backend.hpp"

namespace rtrim {

// One scenario row: within the tau range [tau_lo, tau_hi] the backend emits
// `answer` with probability `prob` and a token count drawn uniformly from
// length_mean +/- length_spread. The range (0, 0) stands for the
// unconstrained prompt. An empty answer string produces a completion with no
// boxed answer at all.
struct ScenarioRow {
  std::string question_id;  // "*" matches any question
  int tau_lo = 0;
  int tau_hi = 0;
  std::string answer;
  double prob = 1.0;
  double length_mean = 100.0;
  double length_spread = 0.0;
  PromptKind kind = PromptKind::solve;
  std::optional<int> iteration;  // restricts the row to one iteration
};

// A validated collection of rows, grouped into categorical distributions.
class ScriptedScenario {
 public:
  static ScriptedScenario from_rows(std::vector<ScenarioRow> rows);
  static ScriptedScenario load(const std::string& path);

  void save(const std::string& path) const;
  std::string to_jsonl() const;

  const std::vector<ScenarioRow>& rows() const { return rows_; }

  // Rows forming the distribution for one request. Iteration-specific groups
  // win over generic ones; an exact question_id wins over "*". Returns null
  // when nothing matches.
  const std::vector<const ScenarioRow*>* find_group(const std::string& question_id,
                                                    std::optional<int> tau,
                                                    PromptKind kind,
                                                    int iteration) const;

 private:
  ScriptedScenario() = default;
  void index_and_validate();

  std::vector<ScenarioRow> rows_;
  // group key -> row pointers; see scripted_backend.cpp for the key layout
  std::map<std::string, std::vector<const ScenarioRow*>> groups_;
};

// Pure function of (scenario, request): replaying a request with the same
// seeds yields bitwise-identical completions.
class ScriptedBackend : public SamplingBackend {
 public:
  explicit ScriptedBackend(ScriptedScenario scenario, std::string label = "inline");

  std::vector<Completion> sample(const PromptRequest& request) override;
  std::string describe() const override;

  const ScriptedScenario& scenario() const { return scenario_; }

 private:
  Completion sample_one(const PromptRequest& request, std::uint64_t seed) const;

  ScriptedScenario scenario_;
  std::string label_;
};

}  // namespace rtrim
