#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "rtrim/core.hpp"
#include "rtrim/extraction.hpp"

namespace rtrim {

// Vote tally for one batch of samples, keyed by answer equivalence class.
struct VoteEntry {
  CanonicalAnswer answer;  // class representative
  int count = 0;
  std::vector<int> lengths;  // token counts, one per vote
};

struct VoteTable {
  std::map<std::string, VoteEntry> entries;  // key -> tally
  int total_extracted = 0;
};

struct ConfidenceResult {
  CanonicalAnswer answer;
  double confidence = 0.0;
  VoteTable table;
};

// Plurality answer and its vote share among samples that extracted anything.
// Ties go to the answer with the smaller median length, then to the
// lexicographically smaller canonical text.
// Throws EvalError("no parsable answers") when nothing extracted.
ConfidenceResult cal_confidence(std::span<const SampleRecord> samples);

// Linear interpolation between closest order statistics: rank p * (n - 1)
// over the sorted values. p = 0 gives the minimum, p = 1 the maximum.
double quantile(std::span<const double> values, double p);

// Length statistic of the samples voting for `answer`:
//   composite     (min + Q1 + median) / 3
//   median_only   median
//   minimum_only  min
// Throws EvalError("answer not present") when no sample matches.
double ans_stat(std::span<const SampleRecord> samples, const CanonicalAnswer& answer,
                LstatMode mode = LstatMode::composite);

enum class HistogramSplit { all, correct_vs_wrong_most_confident };

struct HistogramSpec {
  int bin_width = 100;
  HistogramSplit split = HistogramSplit::all;
};

struct HistogramBin {
  int lo = 0;
  int hi = 0;
  int count = 0;
};

// Correct/wrong pair for one bin of the most-confident-answer split.
struct SplitHistogramBin {
  int lo = 0;
  int hi = 0;
  int correct = 0;
  int wrong = 0;
};

// Token-length histogram over all samples. Bins are [k*w, (k+1)*w),
// contiguous from the lowest to the highest occupied bin.
std::vector<HistogramBin> length_histogram(std::span<const SampleRecord> samples,
                                           const HistogramSpec& spec);

// Per question, keeps only the samples carrying that question's
// most-confident answer, then splits each bin by whether that answer matches
// gold. `gold_by_question` maps question_id to canonical gold text.
std::vector<SplitHistogramBin> length_histogram_confident(
    std::span<const SampleRecord> samples,
    const std::map<std::string, std::string>& gold_by_question,
    const HistogramSpec& spec);

// CSV emission: header `bin_lo,bin_hi,count` / `bin_lo,bin_hi,correct,wrong`.
std::string histogram_csv(const std::vector<HistogramBin>& bins);
std::string histogram_csv(const std::vector<SplitHistogramBin>& bins);

}  // namespace rtrim
