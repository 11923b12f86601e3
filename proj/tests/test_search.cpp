#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rtrim/errors.hpp"
#include "rtrim/scripted_backend.hpp"
#include "rtrim/search.hpp"
#include "scenarios.hpp"

using namespace rtrim;
using rtrim::testing::monotone_scenario;
using rtrim::testing::noisy_iteration_scenario;

namespace {

HistoryEntry entry(int iteration, int tau, std::string answer, double lstat,
                   int votes) {
  HistoryEntry e;
  e.iteration = iteration;
  e.tau = tau;
  e.answer = std::move(answer);
  e.confidence = 0.5;
  e.lstat = lstat;
  e.vote_count = votes;
  return e;
}

RunConfig search_config(int patience) {
  RunConfigInput input;
  input.method = Method::edit;
  input.patience_init = patience;
  RunConfig cfg = validate_config(input);
  return cfg;
}

QuestionRecord question() { return {"q", "compute the value", "5"}; }

}  // namespace

TEST_CASE("check_consistency demands a repeated answer and adaptive lengths") {
  HistoryEntry prev = entry(1, 32, "5", 400.0, 8);

  CHECK(check_consistency(prev, normalize_answer("5"), 250.0, 32, 16, 0.05));
  CHECK(!check_consistency(prev, normalize_answer("7"), 250.0, 32, 16, 0.05));
  // 432 > 400 * 1.05, the length refused to shrink under a tighter constraint
  CHECK(!check_consistency(prev, normalize_answer("5"), 432.0, 32, 16, 0.05));
  CHECK(check_consistency(prev, normalize_answer("5"), 420.0, 32, 16, 0.05));
  // loosening instead demands growth within tolerance
  CHECK(check_consistency(prev, normalize_answer("5"), 395.0, 32, 48, 0.05));
  CHECK(!check_consistency(prev, normalize_answer("5"), 250.0, 32, 48, 0.05));
  // equal taus make the direction clause vacuous
  CHECK(check_consistency(prev, normalize_answer("5"), 999.0, 32, 32, 0.05));
}

TEST_CASE("next_tau_tighten floors the midpoint toward the lower bound") {
  CHECK(next_tau_tighten(14, 2) == 8);
  CHECK(next_tau_tighten(3, 2) == 2);
  CHECK(next_tau_tighten(64, 1) == 32);
}

TEST_CASE("most_confident sums votes across history entries") {
  std::vector<HistoryEntry> history = {
      entry(1, 64, "5", 400, 10),
      entry(2, 32, "5", 300, 9),
      entry(3, 16, "7", 200, 11),
  };
  CHECK(most_confident(history).text == "5");  // 19 beats 11

  std::vector<HistoryEntry> single = {entry(1, 64, "13", 350, 6)};
  CHECK(most_confident(single).text == "13");

  std::vector<HistoryEntry> tied = {
      entry(1, 64, "5", 400, 10),
      entry(2, 32, "7", 300, 10),
  };
  CHECK(most_confident(tied).text == "7");  // later iteration wins the tie

  CHECK_THROWS_WITH_AS(most_confident({}), "search produced no iterations", EvalError);
}

TEST_CASE("dual_goal_search converges onto a sharp threshold") {
  const int tau_star = 6;
  ScriptedBackend backend(monotone_scenario("q", tau_star, "5"));
  RunConfig cfg = search_config(0);

  SearchResult result = dual_goal_search(question(), backend, cfg);
  CHECK(result.final_answer.text == "5");
  CHECK(result.terminal_tau_max >= tau_star);
  CHECK(result.terminal_tau_max <= tau_star + 1);
  CHECK(result.iterations_used <= cfg.max_iterations);
  CHECK(result.total_samples <= cfg.total_budget);
  CHECK(result.tokens_spent > 0);
}

TEST_CASE("search results expose a selected response matching the answer") {
  ScriptedBackend backend(monotone_scenario("q", 10, "5"));
  RunConfig cfg = search_config(1);
  SearchResult result = dual_goal_search(question(), backend, cfg);
  REQUIRE(result.selected_response.extracted_answer);
  CHECK(answers_equal(normalize_answer(*result.selected_response.extracted_answer),
                      result.final_answer));
  for (const HistoryEntry& h : result.history) {
    CHECK(h.tau >= cfg.tau_min);
    CHECK(h.tau <= cfg.tau_max);
    CHECK(h.lstat >= 0.0);
    CHECK(h.confidence <= 1.0);
  }
}

TEST_CASE("one corrupted iteration: patience recovers a shorter response") {
  QuestionRecord q = question();
  ScriptedBackend backend(noisy_iteration_scenario("q", "5", 4));

  SearchResult with_patience = dual_goal_search(q, backend, search_config(1));
  SearchResult without_patience = dual_goal_search(q, backend, search_config(0));

  CHECK(with_patience.final_answer.text == "5");
  CHECK(without_patience.final_answer.text == "5");
  CHECK(with_patience.selected_response.token_count <
        without_patience.selected_response.token_count);
  CHECK(with_patience.total_samples <= 64);
  CHECK(without_patience.total_samples <= 64);
}

TEST_CASE("a unanimous scenario bisects down to the floor") {
  // Same answer at every tau with lengths growing in tau: every iteration is
  // consistent and the constraint halves until the interval closes.
  std::vector<ScenarioRow> rows;
  for (int start = 1; start <= 57; start += 8) {
    double mean = rtrim::testing::band_mean(start + 3.5);
    rows.push_back({"q", start, start + 7, "5", 1.0, mean, 1.0, PromptKind::solve, {}});
  }
  ScriptedBackend backend(ScriptedScenario::from_rows(rows));

  RunConfig cfg = search_config(1);
  SearchResult result = dual_goal_search(question(), backend, cfg);
  CHECK(result.final_answer.text == "5");
  CHECK(result.terminal_tau_max <= cfg.tau_min + 1);
  CHECK(result.history.size() == static_cast<size_t>(result.iterations_used));

  // A taller iteration cap changes nothing: the interval closes first.
  RunConfigInput input;
  input.method = Method::edit;
  input.max_iterations = 10;
  input.total_budget = 100;
  RunConfig tall = validate_config(input);
  SearchResult early = dual_goal_search(question(), backend, tall);
  CHECK(early.iterations_used < tall.max_iterations);
  CHECK(early.terminal_tau_max <= tall.tau_min + 1);
}

TEST_CASE("search trajectories are deterministic") {
  ScriptedBackend backend(monotone_scenario("q", 14, "5"));
  RunConfig cfg = search_config(1);
  SearchResult a = dual_goal_search(question(), backend, cfg);
  SearchResult b = dual_goal_search(question(), backend, cfg);
  CHECK(a.final_answer.text == b.final_answer.text);
  CHECK(a.total_samples == b.total_samples);
  CHECK(a.tokens_spent == b.tokens_spent);
  CHECK(a.selected_response.seed == b.selected_response.seed);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].answer == b.history[i].answer);
    CHECK(a.history[i].lstat == b.history[i].lstat);
    CHECK(a.history[i].tau == b.history[i].tau);
  }
}

TEST_CASE("disagreement with spent patience skips the history entry") {
  ScriptedBackend backend(monotone_scenario("q", 20, "5"));
  RunConfig cfg = search_config(0);

  struct Recorder : SearchObserver {
    int recorded = 0;
    int skipped = 0;
    void on_history(const HistoryEntry&, bool was_recorded) override {
      if (was_recorded) ++recorded;
      else ++skipped;
    }
  } recorder;

  SearchResult result = dual_goal_search(question(), backend, cfg, &recorder);
  CHECK(result.final_answer.text == "5");
  CHECK(recorder.skipped > 0);  // the sub-threshold probes disagree and vanish
  CHECK(recorder.recorded == static_cast<int>(result.history.size()));
  for (const HistoryEntry& h : result.history) CHECK(h.answer == "5");
}

TEST_CASE("search reports unparsable scenarios as an error") {
  std::vector<ScenarioRow> rows = {
      {"q", 1, 64, "", 1.0, 100.0, 5.0, PromptKind::solve, {}}};
  ScriptedBackend backend(ScriptedScenario::from_rows(rows));
  RunConfig cfg = search_config(1);
  CHECK_THROWS_WITH_AS(dual_goal_search(question(), backend, cfg),
                       "no parsable answers", EvalError);
}

TEST_CASE("an unparsable iteration is skipped without derailing the search") {
  // The band holding tau=16 parses nothing at iteration 3; everything else is
  // a clean threshold at 6.
  std::vector<ScenarioRow> rows = monotone_scenario("q", 6, "5").rows();
  rows.push_back({"q", 9, 16, "", 1.0, 170.0, 4.0, PromptKind::solve, 3});
  ScriptedBackend backend(ScriptedScenario::from_rows(std::move(rows)));

  RunConfig cfg = search_config(0);
  SearchResult result = dual_goal_search(question(), backend, cfg);
  CHECK(result.final_answer.text == "5");
  CHECK(result.total_samples <= cfg.total_budget);
}
