#pragma once

#include <span>
#include <vector>

#include "rtrim/backend.hpp"
#include "rtrim/core.hpp"
#include "rtrim/extraction.hpp"

namespace rtrim {

struct SearchResult {
  CanonicalAnswer final_answer;
  SampleRecord selected_response;  // shortest completion carrying final_answer
  int iterations_used = 0;
  int total_samples = 0;
  long long tokens_spent = 0;
  std::vector<HistoryEntry> history;  // recorded entries only
  int terminal_tau_min = 0;
  int terminal_tau_max = 0;
};

// Streaming hook for run logs. `recorded` is false for iterations whose
// entry was skipped by the disagreement branch.
class SearchObserver {
 public:
  virtual ~SearchObserver() = default;
  virtual void on_sample(const SampleRecord&) {}
  virtual void on_history(const HistoryEntry&, bool /*recorded*/) {}
};

// Consistency between consecutive iterations: the answer must repeat and the
// length statistic must move with the constraint (within a relative
// tolerance). Equal taus make the direction clause vacuous.
bool check_consistency(const HistoryEntry& prev, const CanonicalAnswer& cur_answer,
                       double cur_lstat, int prev_tau, int cur_tau, double eps_tol);

// Midpoint toward the lower bound; requires tau_min < tau_cur.
int next_tau_tighten(int tau_cur, int tau_min);

// Answer with the highest summed vote count across entries. Ties go to the
// more recent iteration, then to the smaller lstat.
CanonicalAnswer most_confident(std::span<const HistoryEntry> history);

// Bisection over the step constraint balancing answer stability against
// reasoning length. Starts at the loosest constraint with full patience;
// stops after cfg.max_iterations or once the interval narrows to one step.
SearchResult dual_goal_search(const QuestionRecord& question, SamplingBackend& backend,
                              const RunConfig& cfg, SearchObserver* observer = nullptr);

}  // namespace rtrim
