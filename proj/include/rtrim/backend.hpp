#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtrim/core.hpp"

namespace rtrim {

// What kind of prompt a request carries. The scripted backend keys its
// response tables on this.
enum class PromptKind { solve, prune };

struct PromptRequest {
  std::string system_text;
  std::string user_text;
  int n = 1;
  double temperature = 0.7;
  double top_p = 0.9;
  int max_tokens = 2048;
  std::vector<std::uint64_t> seeds;  // one per sample, n == seeds.size()

  // Routing metadata. The live backend ignores it; the scripted backend uses
  // it to look up the matching scenario rows.
  std::string question_id;
  std::optional<int> tau;  // empty for the unconstrained prompt
  int iteration = 1;
  PromptKind kind = PromptKind::solve;
};

struct Completion {
  std::string text;
  int token_count = 0;  // completion tokens as reported by the backend
  std::optional<double> logprob_sum;
  enum class FinishReason { stop, length } finish_reason = FinishReason::stop;
};

// A source of sampled completions. Implementations must return exactly
// request.n completions in seed order.
class SamplingBackend {
 public:
  virtual ~SamplingBackend() = default;
  virtual std::vector<Completion> sample(const PromptRequest& request) = 0;
  virtual std::string describe() const = 0;
};

// Default system turn; recorded in the run manifest.
extern const std::string kSystemPrompt;

// Step-constrained prompt: the solve template with both num_step slots and
// the question substituted. Throws ConfigError when num_step < 1.
std::string render_constrained_prompt(const std::string& question, int num_step);

// Solve template with the step-limit sentences removed.
std::string render_unconstrained_prompt(const std::string& question);

// Asks the model to shorten an existing solution while keeping its boxed
// final answer.
std::string render_prune_prompt(const std::string& solution);

}  // namespace rtrim
