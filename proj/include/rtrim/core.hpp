#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rtrim {

enum class Method { edit, dp, bon, st };

std::string method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

// Which statistic of the matching-length distribution drives the search.
enum class LstatMode { composite, median_only, minimum_only };

std::string lstat_mode_name(LstatMode m);
std::optional<LstatMode> parse_lstat_mode(std::string_view name);

// One benchmark item: the question text and its canonical gold answer.
struct QuestionRecord {
  std::string id;
  std::string prompt_text;
  std::string gold_answer;  // normalized canonical text
};

// One model completion together with the constraint it was sampled under.
// `tau` is the step-count constraint; empty means the unconstrained prompt.
struct SampleRecord {
  std::string question_id;
  Method method = Method::edit;
  int iteration = 1;   // 1-based
  std::optional<int> tau;
  int sample_index = 0;
  std::string completion_text;
  std::optional<std::string> extracted_answer;  // canonical text
  int token_count = 0;
  std::optional<double> logprob_sum;
  std::uint64_t seed = 0;
};

// Per-iteration search memory element.
struct HistoryEntry {
  int iteration = 0;
  int tau = 0;
  std::string answer;  // canonical text of the iteration's plurality answer
  double confidence = 0.0;
  double lstat = 0.0;
  int vote_count = 0;
};

// Fully validated run configuration. Build one through validate_config().
struct RunConfig {
  Method method = Method::edit;
  int total_budget = 64;       // N, total samples per question
  int max_iterations = 6;      // T
  int patience_init = 1;       // initial patience
  int tau_min = 1;
  int tau_max = 64;
  double gamma = 2.0;          // wrong-answer length penalty factor, > 1
  double eps_tol = 0.05;       // relative tolerance for length adaptation
  double temperature = 0.7;
  double top_p = 0.9;
  int max_tokens = 2048;
  int concurrency_cap = 1;
  std::uint64_t run_seed = 0;
  LstatMode lstat_mode = LstatMode::composite;

  int samples_per_iteration() const { return total_budget / max_iterations; }
};

// Same knobs with everything optional; unset fields take defaults.
struct RunConfigInput {
  std::optional<Method> method;
  std::optional<int> total_budget;
  std::optional<int> max_iterations;
  std::optional<int> patience_init;
  std::optional<int> tau_min;
  std::optional<int> tau_max;
  std::optional<double> gamma;
  std::optional<double> eps_tol;
  std::optional<double> temperature;
  std::optional<double> top_p;
  std::optional<int> max_tokens;
  std::optional<int> concurrency_cap;
  std::optional<std::uint64_t> run_seed;
  std::optional<LstatMode> lstat_mode;
};

// Fills defaults and checks every invariant. Throws ConfigError with a
// distinct message per violated rule.
RunConfig validate_config(const RunConfigInput& raw);

// Deterministic per-sample seed. Pure mixing of all four inputs; stable
// across platforms and positional in (iteration, sample_index).
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view question_id,
                          int iteration, int sample_index);

// splitmix64 finalizer, also used by the scripted backend's stream RNG.
std::uint64_t mix64(std::uint64_t x);

}  // namespace rtrim
