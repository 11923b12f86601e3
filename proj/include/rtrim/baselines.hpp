#pragma once

#include <optional>

#include "rtrim/backend.hpp"
#include "rtrim/core.hpp"
#include "rtrim/extraction.hpp"
#include "rtrim/search.hpp"

namespace rtrim {

struct BaselineResult {
  std::optional<CanonicalAnswer> final_answer;  // absent when nothing parsed
  std::optional<SampleRecord> selected_response;
  int total_samples = 0;
  long long tokens_spent = 0;
};

// Direct prompting: one greedy completion under the unconstrained prompt.
// An unparsable completion yields an absent answer, scored wrong upstream.
BaselineResult run_dp(const QuestionRecord& question, SamplingBackend& backend,
                      const RunConfig& cfg, SearchObserver* observer = nullptr);

// Best-of-N: N unconstrained samples, majority vote, then the shortest
// completion among the majority. Throws EvalError when nothing parses.
BaselineResult run_bon(const QuestionRecord& question, SamplingBackend& backend,
                       const RunConfig& cfg, SearchObserver* observer = nullptr);

// Self-truncation: half the budget samples solutions, the other half prunes
// every majority chain. Picks the shortest pruned output that preserved the
// majority answer, never worse than the shortest phase-one majority chain.
BaselineResult run_st(const QuestionRecord& question, SamplingBackend& backend,
                      const RunConfig& cfg, SearchObserver* observer = nullptr);

}  // namespace rtrim
