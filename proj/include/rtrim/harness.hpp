#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rtrim/backend.hpp"
#include "rtrim/core.hpp"
#include "rtrim/metrics.hpp"
#include "rtrim/run_log.hpp"
#include "rtrim/stats.hpp"

namespace rtrim {

struct RunPaths {
  std::string dir;
  std::string log;
  std::string manifest;
  std::string metrics;

  static RunPaths in(const std::string& dir);
};

// Aggregate metrics for one run.
struct MetricsReport {
  size_t questions = 0;
  size_t errors = 0;
  double accuracy = 0.0;           // fraction
  double mean_correct_length = 0.0;
  double penalized_len = 0.0;
  double gamma = 2.0;
  double aeu_rescaled = 0.0;       // accuracy in percent per penalized token, x100
  long long total_samples = 0;
  long long total_tokens = 0;
};

MetricsReport metrics_from_summaries(const std::vector<LogSummary>& summaries,
                                     double gamma);

// Executes the configured method over every question, streaming records into
// out_dir/run_log.jsonl. With resume=true, questions that already have a
// summary are skipped and the rest re-run; per-question failures become error
// summaries instead of aborting the run. Writes metrics.json and returns the
// report.
MetricsReport run(const RunConfig& cfg, const std::vector<QuestionRecord>& dataset,
                  SamplingBackend& backend, const std::string& out_dir,
                  bool resume = false, const std::string& dataset_path = "");

// Recomputes metrics from the log alone and writes report.json, plus bca.csv
// when budgets are given. Pure function of the log and the flags.
MetricsReport write_report(const std::string& run_dir, double gamma,
                           const std::optional<BudgetSpec>& budgets);

// Emits a histogram CSV from the log's sample lines (last attempt per
// question). Returns the path written. tau_filter selects a tau range;
// {0, 0} selects unconstrained samples.
std::string write_histogram_file(const std::string& run_dir, int bin_width,
                                 HistogramSplit split,
                                 std::optional<std::pair<int, int>> tau_filter);

// Samples of the attempt that produced each question's summary.
std::vector<SampleRecord> effective_samples(const RunLogContents& contents);

}  // namespace rtrim
