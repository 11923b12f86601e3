#include "rtrim/search.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "rtrim/errors.hpp"
#include "rtrim/sampling.hpp"
#include "rtrim/stats.hpp"

namespace rtrim {

bool check_consistency(const HistoryEntry& prev, const CanonicalAnswer& cur_answer,
                       double cur_lstat, int prev_tau, int cur_tau, double eps_tol) {
  if (!answers_equal(normalize_answer(prev.answer), cur_answer)) return false;
  if (cur_tau < prev_tau) return cur_lstat <= prev.lstat * (1.0 + eps_tol);
  if (cur_tau > prev_tau) return cur_lstat >= prev.lstat * (1.0 - eps_tol);
  return true;
}

int next_tau_tighten(int tau_cur, int tau_min) { return (tau_cur + tau_min) / 2; }

CanonicalAnswer most_confident(std::span<const HistoryEntry> history) {
  if (history.empty()) throw EvalError("search produced no iterations");

  struct Tally {
    CanonicalAnswer answer;
    long long votes = 0;
    int last_iteration = 0;
    double min_lstat = std::numeric_limits<double>::infinity();
  };
  std::map<std::string, Tally> tallies;
  for (const HistoryEntry& entry : history) {
    CanonicalAnswer canon = normalize_answer(entry.answer);
    auto [it, inserted] = tallies.try_emplace(canon.key());
    if (inserted) it->second.answer = std::move(canon);
    it->second.votes += entry.vote_count;
    it->second.last_iteration = std::max(it->second.last_iteration, entry.iteration);
    it->second.min_lstat = std::min(it->second.min_lstat, entry.lstat);
  }

  const Tally* best = nullptr;
  for (const auto& [key, tally] : tallies) {
    if (best == nullptr || tally.votes > best->votes ||
        (tally.votes == best->votes &&
         (tally.last_iteration > best->last_iteration ||
          (tally.last_iteration == best->last_iteration &&
           tally.min_lstat < best->min_lstat)))) {
      best = &tally;
    }
  }
  return best->answer;
}

namespace {

int midpoint(int lo, int hi) { return (lo + hi) / 2; }

int winner_votes(const ConfidenceResult& conf) {
  auto it = conf.table.entries.find(conf.answer.key());
  return it == conf.table.entries.end() ? 0 : it->second.count;
}

}  // namespace

SearchResult dual_goal_search(const QuestionRecord& question, SamplingBackend& backend,
                              const RunConfig& cfg, SearchObserver* observer) {
  const int per_iteration = cfg.samples_per_iteration();
  int tau_lo = cfg.tau_min;
  int tau_hi = cfg.tau_max;
  int tau_cur = tau_hi;  // loosest constraint first
  int prev_tau = tau_cur;
  int patience = cfg.patience_init;

  std::vector<HistoryEntry> history;
  std::vector<SampleRecord> all_samples;
  long long tokens_spent = 0;
  int iterations_used = 0;

  for (int t = 1; t <= cfg.max_iterations; ++t) {
    iterations_used = t;

    DrawSpec spec;
    spec.method = Method::edit;
    spec.iteration = t;
    spec.tau = tau_cur;
    spec.user_text = render_constrained_prompt(question.prompt_text, tau_cur);
    spec.n = per_iteration;
    spec.temperature = cfg.temperature;
    spec.top_p = cfg.top_p;
    std::vector<SampleRecord> records = draw_samples(question, backend, cfg, spec);
    for (const SampleRecord& r : records) {
      tokens_spent += r.token_count;
      if (observer) observer->on_sample(r);
    }
    all_samples.insert(all_samples.end(), records.begin(), records.end());

    ConfidenceResult conf;
    try {
      conf = cal_confidence(records);
    } catch (const EvalError&) {
      prev_tau = tau_cur;  // nothing parsable; spend the iteration and move on
      continue;
    }
    double lstat = ans_stat(records, conf.answer, cfg.lstat_mode);

    HistoryEntry entry;
    entry.iteration = t;
    entry.tau = tau_cur;
    entry.answer = conf.answer.text;
    entry.confidence = conf.confidence;
    entry.lstat = lstat;
    entry.vote_count = winner_votes(conf);

    bool consistent =
        history.empty() || check_consistency(history.back(), conf.answer, lstat,
                                             history.back().tau, tau_cur, cfg.eps_tol);

    bool record_entry = true;
    int tau_next = tau_cur;
    if (consistent) {
      tau_hi = tau_cur;
      tau_next = midpoint(tau_lo, tau_hi);
    } else if (patience == 0) {
      if (answers_equal(conf.answer, most_confident(history))) {
        tau_hi = tau_cur;
        patience = cfg.patience_init;
      } else {
        tau_lo = tau_cur;
        record_entry = false;  // disagreement: drop the entry, keep patience spent
      }
      tau_next = midpoint(tau_lo, tau_hi);
    } else {
      // Patience left: retry between the previous constraint and the floor.
      tau_next = prev_tau > tau_lo ? next_tau_tighten(prev_tau, tau_lo) : tau_cur;
      patience -= 1;
    }

    if (record_entry) {
      history.push_back(entry);
      if (observer) observer->on_history(entry, true);
    } else if (observer) {
      observer->on_history(entry, false);
    }

    prev_tau = tau_cur;
    tau_cur = std::clamp(tau_next, tau_lo, tau_hi);
    if (tau_hi - tau_lo <= 1) break;
  }

  if (history.empty()) throw EvalError("no parsable answers");

  CanonicalAnswer final_answer = most_confident(history);
  std::string final_key = final_answer.key();
  const SampleRecord* best = nullptr;
  for (const SampleRecord& r : all_samples) {
    if (!r.extracted_answer) continue;
    if (normalize_answer(*r.extracted_answer).key() != final_key) continue;
    if (best == nullptr || r.token_count < best->token_count) best = &r;
  }
  if (best == nullptr) throw EvalError("no sampled completion carries the final answer");

  SearchResult result;
  result.final_answer = std::move(final_answer);
  result.selected_response = *best;
  result.iterations_used = iterations_used;
  result.total_samples = static_cast<int>(all_samples.size());
  result.tokens_spent = tokens_spent;
  result.history = std::move(history);
  result.terminal_tau_min = tau_lo;
  result.terminal_tau_max = tau_hi;
  return result;
}

}  // namespace rtrim
