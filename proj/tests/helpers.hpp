#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtrim/core.hpp"

namespace rtrim::testing {

inline SampleRecord make_sample(std::string answer, int token_count,
                                int sample_index = 0, int iteration = 1,
                                std::optional<int> tau = std::nullopt,
                                std::string question_id = "q") {
  SampleRecord s;
  s.question_id = std::move(question_id);
  s.iteration = iteration;
  s.tau = tau;
  s.sample_index = sample_index;
  s.token_count = token_count;
  if (!answer.empty()) {
    s.completion_text = "Final Answer: \\boxed{" + answer + "}";
    s.extracted_answer = std::move(answer);
  } else {
    s.completion_text = "ran out of steps";
  }
  return s;
}

// Deterministic uniform helpers for property tests.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t out = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

  int next_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace rtrim::testing
