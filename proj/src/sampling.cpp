#include "rtrim/sampling.hpp"

#include "rtrim/errors.hpp"
#include "rtrim/extraction.hpp"

namespace rtrim {

std::vector<SampleRecord> draw_samples(const QuestionRecord& question,
                                       SamplingBackend& backend,
                                       const RunConfig& cfg, const DrawSpec& spec) {
  PromptRequest request;
  request.system_text = kSystemPrompt;
  request.user_text = spec.user_text;
  request.n = spec.n;
  request.temperature = spec.temperature;
  request.top_p = spec.top_p;
  request.max_tokens = cfg.max_tokens;
  request.question_id = question.id;
  request.tau = spec.tau;
  request.iteration = spec.iteration;
  request.kind = spec.kind;
  request.seeds.reserve(spec.n);
  for (int j = 0; j < spec.n; ++j)
    request.seeds.push_back(derive_seed(cfg.run_seed, question.id, spec.iteration,
                                        spec.sample_index_offset + j));

  std::vector<Completion> completions = backend.sample(request);
  if (completions.size() != static_cast<size_t>(spec.n))
    throw ProtocolError("backend returned " + std::to_string(completions.size()) +
                        " completions, expected " + std::to_string(spec.n));

  std::vector<SampleRecord> records;
  records.reserve(completions.size());
  for (size_t j = 0; j < completions.size(); ++j) {
    const Completion& c = completions[j];
    SampleRecord r;
    r.question_id = question.id;
    r.method = cfg.method;
    r.iteration = spec.iteration;
    r.tau = spec.tau;
    r.sample_index = spec.sample_index_offset + static_cast<int>(j);
    r.completion_text = c.text;
    if (auto canon = extract_canonical(c.text)) r.extracted_answer = canon->text;
    r.token_count = c.token_count;
    r.logprob_sum = c.logprob_sum;
    r.seed = request.seeds[j];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace rtrim
