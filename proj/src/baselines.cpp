#include "rtrim/baselines.hpp"

#include <algorithm>

#include "rtrim/errors.hpp"
#include "rtrim/sampling.hpp"
#include "rtrim/stats.hpp"

namespace rtrim {

namespace {

long long sum_tokens(const std::vector<SampleRecord>& records) {
  long long total = 0;
  for (const SampleRecord& r : records) total += r.token_count;
  return total;
}

void notify(SearchObserver* observer, const std::vector<SampleRecord>& records) {
  if (!observer) return;
  for (const SampleRecord& r : records) observer->on_sample(r);
}

// Shortest record whose extracted answer matches `key`; earliest wins ties.
const SampleRecord* shortest_matching(const std::vector<SampleRecord>& records,
                                      const std::string& key) {
  const SampleRecord* best = nullptr;
  for (const SampleRecord& r : records) {
    if (!r.extracted_answer) continue;
    if (normalize_answer(*r.extracted_answer).key() != key) continue;
    if (best == nullptr || r.token_count < best->token_count) best = &r;
  }
  return best;
}

}  // namespace

BaselineResult run_dp(const QuestionRecord& question, SamplingBackend& backend,
                      const RunConfig& cfg, SearchObserver* observer) {
  DrawSpec spec;
  spec.method = Method::dp;
  spec.iteration = 1;
  spec.user_text = render_unconstrained_prompt(question.prompt_text);
  spec.n = 1;
  spec.temperature = 0.0;  // greedy
  spec.top_p = 1.0;
  std::vector<SampleRecord> records = draw_samples(question, backend, cfg, spec);
  notify(observer, records);

  BaselineResult result;
  result.total_samples = 1;
  result.tokens_spent = sum_tokens(records);
  result.selected_response = records.front();
  if (records.front().extracted_answer)
    result.final_answer = normalize_answer(*records.front().extracted_answer);
  return result;
}

BaselineResult run_bon(const QuestionRecord& question, SamplingBackend& backend,
                       const RunConfig& cfg, SearchObserver* observer) {
  DrawSpec spec;
  spec.method = Method::bon;
  spec.iteration = 1;
  spec.user_text = render_unconstrained_prompt(question.prompt_text);
  spec.n = cfg.total_budget;
  spec.temperature = cfg.temperature;
  spec.top_p = cfg.top_p;
  std::vector<SampleRecord> records = draw_samples(question, backend, cfg, spec);
  notify(observer, records);

  ConfidenceResult conf = cal_confidence(records);
  const SampleRecord* best = shortest_matching(records, conf.answer.key());

  BaselineResult result;
  result.final_answer = conf.answer;
  result.selected_response = *best;
  result.total_samples = static_cast<int>(records.size());
  result.tokens_spent = sum_tokens(records);
  return result;
}

BaselineResult run_st(const QuestionRecord& question, SamplingBackend& backend,
                      const RunConfig& cfg, SearchObserver* observer) {
  if (cfg.total_budget < 2) throw ConfigError("self-truncation needs N >= 2");

  DrawSpec generate;
  generate.method = Method::st;
  generate.iteration = 1;
  generate.user_text = render_unconstrained_prompt(question.prompt_text);
  generate.n = cfg.total_budget / 2;
  generate.temperature = cfg.temperature;
  generate.top_p = cfg.top_p;
  std::vector<SampleRecord> chains = draw_samples(question, backend, cfg, generate);
  notify(observer, chains);

  ConfidenceResult conf = cal_confidence(chains);
  std::string majority_key = conf.answer.key();
  const SampleRecord* fallback = shortest_matching(chains, majority_key);

  // Phase two: prune each majority chain once. The chain count never exceeds
  // the remaining budget because the generate phase took the floor half.
  std::vector<SampleRecord> pruned;
  long long prune_tokens = 0;
  int prune_index = 0;
  for (const SampleRecord& chain : chains) {
    if (!chain.extracted_answer) continue;
    if (normalize_answer(*chain.extracted_answer).key() != majority_key) continue;

    DrawSpec prune;
    prune.method = Method::st;
    prune.iteration = 2;
    prune.kind = PromptKind::prune;
    prune.user_text = render_prune_prompt(chain.completion_text);
    prune.n = 1;
    prune.sample_index_offset = prune_index++;
    prune.temperature = cfg.temperature;
    prune.top_p = cfg.top_p;
    std::vector<SampleRecord> out = draw_samples(question, backend, cfg, prune);
    prune_tokens += out.front().token_count;
    notify(observer, out);
    pruned.push_back(std::move(out.front()));
  }

  const SampleRecord* selected = fallback;
  for (const SampleRecord& p : pruned) {
    if (!p.extracted_answer) continue;
    if (normalize_answer(*p.extracted_answer).key() != majority_key) continue;
    if (p.token_count < selected->token_count) selected = &p;
  }

  BaselineResult result;
  result.final_answer = conf.answer;
  result.selected_response = *selected;
  result.total_samples = static_cast<int>(chains.size() + pruned.size());
  result.tokens_spent = sum_tokens(chains) + prune_tokens;
  return result;
}

}  // namespace rtrim
