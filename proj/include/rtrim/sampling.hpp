#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtrim/backend.hpp"
#include "rtrim/core.hpp"

namespace rtrim {

// One batch of samples to request for a question.
struct DrawSpec {
  Method method = Method::edit;
  int iteration = 1;
  std::optional<int> tau;  // empty means the prompt is unconstrained
  PromptKind kind = PromptKind::solve;
  std::string user_text;
  int n = 1;
  int sample_index_offset = 0;  // first sample's index within the iteration
  double temperature = 0.7;
  double top_p = 0.9;
};

// Renders the request, derives one seed per sample from
// (run_seed, question_id, iteration, sample_index), calls the backend and
// converts the completions into SampleRecords in sample_index order.
std::vector<SampleRecord> draw_samples(const QuestionRecord& question,
                                       SamplingBackend& backend,
                                       const RunConfig& cfg, const DrawSpec& spec);

}  // namespace rtrim
