#include <doctest.h>

#include <deque>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rtrim/baselines.hpp"
#include "rtrim/errors.hpp"
#include "rtrim/scripted_backend.hpp"
#include "scenarios.hpp"

using namespace rtrim;

namespace {

Completion completion(const std::string& answer, int tokens) {
  Completion c;
  c.token_count = tokens;
  c.text = answer.empty() ? std::string("no box")
                          : "work...\nFinal Answer: \\boxed{" + answer + "}";
  return c;
}

// Replays canned responses; each sample() call consumes one batch.
class FakeBackend : public SamplingBackend {
 public:
  std::deque<std::vector<Completion>> batches;
  std::vector<PromptRequest> requests;

  std::vector<Completion> sample(const PromptRequest& request) override {
    REQUIRE(!batches.empty());
    requests.push_back(request);
    std::vector<Completion> batch = std::move(batches.front());
    batches.pop_front();
    REQUIRE(batch.size() == static_cast<size_t>(request.n));
    return batch;
  }

  std::string describe() const override { return "fake"; }
};

QuestionRecord question() { return {"q", "compute the value", "5"}; }

RunConfig config_with_budget(int budget) {
  RunConfigInput input;
  input.total_budget = budget;
  input.max_iterations = 1;
  return validate_config(input);
}

}  // namespace

TEST_CASE("run_dp passes one greedy completion through") {
  FakeBackend backend;
  backend.batches.push_back({completion("5", 120)});
  RunConfig cfg = config_with_budget(64);

  BaselineResult result = run_dp(question(), backend, cfg);
  REQUIRE(result.final_answer);
  CHECK(result.final_answer->text == "5");
  CHECK(result.total_samples == 1);
  CHECK(result.tokens_spent == 120);
  REQUIRE(backend.requests.size() == 1);
  CHECK(backend.requests[0].temperature == doctest::Approx(0.0));
  CHECK(!backend.requests[0].tau.has_value());
}

TEST_CASE("run_dp scores an unparsable greedy output as absent") {
  FakeBackend backend;
  backend.batches.push_back({completion("", 80)});
  BaselineResult result = run_dp(question(), backend, config_with_budget(64));
  CHECK(!result.final_answer);
  REQUIRE(result.selected_response);
  CHECK(result.selected_response->token_count == 80);
}

TEST_CASE("run_dp replays are identical on the scripted backend") {
  ScriptedBackend backend(rtrim::testing::three_question_scenario());
  QuestionRecord q = {"q1", "What is 0+1?", "1"};
  RunConfig cfg = config_with_budget(64);
  BaselineResult a = run_dp(q, backend, cfg);
  BaselineResult b = run_dp(q, backend, cfg);
  REQUIRE(a.selected_response);
  REQUIRE(b.selected_response);
  CHECK(a.selected_response->completion_text == b.selected_response->completion_text);
  CHECK(a.selected_response->token_count == b.selected_response->token_count);
}

TEST_CASE("run_bon votes then picks the shortest majority completion") {
  FakeBackend backend;
  backend.batches.push_back({
      completion("5", 300),
      completion("5", 220),
      completion("5", 410),
      completion("7", 150),
  });
  BaselineResult result = run_bon(question(), backend, config_with_budget(4));
  REQUIRE(result.final_answer);
  CHECK(result.final_answer->text == "5");
  CHECK(result.selected_response->token_count == 220);
  CHECK(result.total_samples == 4);
}

TEST_CASE("run_bon with unanimous answers returns the shortest overall") {
  FakeBackend backend;
  backend.batches.push_back({
      completion("9", 400),
      completion("9", 180),
      completion("9", 250),
  });
  BaselineResult result = run_bon(question(), backend, config_with_budget(3));
  CHECK(result.selected_response->token_count == 180);
}

TEST_CASE("run_bon errors when every sample is unparsable") {
  FakeBackend backend;
  backend.batches.push_back({completion("", 10), completion("", 20)});
  CHECK_THROWS_WITH_AS(run_bon(question(), backend, config_with_budget(2)),
                       "no parsable answers", EvalError);
}

TEST_CASE("run_st prunes majority chains and keeps the best preserved cut") {
  FakeBackend backend;
  // Phase one: majority answer 5 with chains of 278 and 301 tokens.
  backend.batches.push_back({
      completion("5", 278),
      completion("5", 301),
      completion("7", 150),
  });
  // Phase two prunes both majority chains; one preserves 5 at 226 tokens.
  backend.batches.push_back({completion("5", 226)});
  backend.batches.push_back({completion("5", 260)});

  BaselineResult result = run_st(question(), backend, config_with_budget(6));
  REQUIRE(result.final_answer);
  CHECK(result.final_answer->text == "5");
  CHECK(result.selected_response->token_count == 226);
  CHECK(result.total_samples == 5);  // 3 chains + 2 prunes
  REQUIRE(backend.requests.size() == 3);
  CHECK(backend.requests[1].kind == PromptKind::prune);
  // The prune prompt embeds the original chain.
  CHECK(backend.requests[1].user_text.find("\\boxed{5}") != std::string::npos);
}

TEST_CASE("run_st falls back to phase one when pruning flips every answer") {
  FakeBackend backend;
  backend.batches.push_back({
      completion("5", 278),
      completion("5", 301),
      completion("7", 150),
  });
  backend.batches.push_back({completion("8", 100)});
  backend.batches.push_back({completion("", 90)});

  BaselineResult result = run_st(question(), backend, config_with_budget(6));
  CHECK(result.final_answer->text == "5");
  CHECK(result.selected_response->token_count == 278);
}

TEST_CASE("run_st never returns a longer response than its fallback") {
  FakeBackend backend;
  backend.batches.push_back({
      completion("5", 200),
      completion("5", 240),
  });
  // Both prunes preserve the answer but come back longer.
  backend.batches.push_back({completion("5", 320)});
  backend.batches.push_back({completion("5", 330)});

  BaselineResult result = run_st(question(), backend, config_with_budget(4));
  CHECK(result.selected_response->token_count == 200);
}

TEST_CASE("run_st handles the degenerate two-sample budget") {
  FakeBackend backend;
  backend.batches.push_back({completion("5", 150)});
  backend.batches.push_back({completion("5", 90)});
  BaselineResult result = run_st(question(), backend, config_with_budget(2));
  CHECK(result.final_answer->text == "5");
  CHECK(result.selected_response->token_count == 90);
  CHECK(result.total_samples == 2);
}

TEST_CASE("run_st errors when phase one parses nothing") {
  FakeBackend backend;
  backend.batches.push_back({completion("", 10), completion("", 12)});
  CHECK_THROWS_WITH_AS(run_st(question(), backend, config_with_budget(4)),
                       "no parsable answers", EvalError);
}

TEST_CASE("baselines respect the total sampling budget on fuzzed scenarios") {
  rtrim::testing::TestRng rng(4242);
  for (int trial = 0; trial < 60; ++trial) {
    std::string qid = "q" + std::to_string(trial);
    ScriptedBackend backend(rtrim::testing::fuzz_scenario(qid, rng));
    QuestionRecord q = {qid, "prompt", "a0"};

    RunConfigInput input;
    input.max_iterations = 1;
    input.total_budget = rng.next_int(2, 64);
    input.run_seed = rng.next_u64();
    RunConfig cfg = validate_config(input);

    struct Counter : SearchObserver {
      int samples = 0;
      void on_sample(const SampleRecord&) override { ++samples; }
    };

    for (Method m : {Method::dp, Method::bon, Method::st}) {
      Counter counter;
      cfg.method = m;
      try {
        switch (m) {
          case Method::dp: run_dp(q, backend, cfg, &counter); break;
          case Method::bon: run_bon(q, backend, cfg, &counter); break;
          case Method::st: run_st(q, backend, cfg, &counter); break;
          default: break;
        }
      } catch (const EvalError&) {
        // unparsable rows can starve a method; the budget still binds
      }
      CHECK(counter.samples <= cfg.total_budget);
    }
  }
}
