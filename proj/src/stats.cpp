#include "rtrim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rtrim/errors.hpp"

namespace rtrim {

namespace {

VoteTable build_vote_table(std::span<const SampleRecord> samples) {
  VoteTable table;
  for (const SampleRecord& s : samples) {
    if (!s.extracted_answer) continue;
    CanonicalAnswer canon = normalize_answer(*s.extracted_answer);
    std::string key = canon.key();
    auto [it, inserted] = table.entries.try_emplace(key);
    if (inserted) {
      // Numeric classes render through the rational so the representative is
      // stable no matter which surface form arrived first.
      if (canon.numeric_value) canon.text = canon.numeric_value->render();
      it->second.answer = canon;
    }
    it->second.count += 1;
    it->second.lengths.push_back(s.token_count);
    table.total_extracted += 1;
  }
  return table;
}

double median_of(std::vector<int> lengths) {
  std::vector<double> vals(lengths.begin(), lengths.end());
  return quantile(vals, 0.5);
}

}  // namespace

ConfidenceResult cal_confidence(std::span<const SampleRecord> samples) {
  VoteTable table = build_vote_table(samples);
  if (table.total_extracted == 0) throw EvalError("no parsable answers");

  const VoteEntry* best = nullptr;
  double best_median = 0.0;
  for (const auto& [key, entry] : table.entries) {
    double med = median_of(entry.lengths);
    if (best == nullptr || entry.count > best->count ||
        (entry.count == best->count &&
         (med < best_median ||
          (med == best_median && entry.answer.text < best->answer.text)))) {
      best = &entry;
      best_median = med;
    }
  }

  ConfidenceResult out;
  out.answer = best->answer;
  out.confidence = static_cast<double>(best->count) / table.total_extracted;
  out.table = std::move(table);
  return out;
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw EvalError("quantile of empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  double rank = p * static_cast<double>(sorted.size() - 1);
  size_t lo = static_cast<size_t>(rank);
  double frac = rank - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double ans_stat(std::span<const SampleRecord> samples, const CanonicalAnswer& answer,
                LstatMode mode) {
  std::string key = answer.key();
  std::vector<double> lengths;
  for (const SampleRecord& s : samples) {
    if (!s.extracted_answer) continue;
    if (normalize_answer(*s.extracted_answer).key() == key)
      lengths.push_back(static_cast<double>(s.token_count));
  }
  if (lengths.empty()) throw EvalError("answer not present");
  switch (mode) {
    case LstatMode::median_only: return quantile(lengths, 0.5);
    case LstatMode::minimum_only: return quantile(lengths, 0.0);
    case LstatMode::composite: break;
  }
  return (quantile(lengths, 0.0) + quantile(lengths, 0.25) + quantile(lengths, 0.5)) / 3.0;
}

namespace {

int bin_floor(int length, int width) { return (length / width) * width; }

template <typename Bin>
std::vector<Bin> make_bin_range(int lo_bin, int hi_bin, int width) {
  std::vector<Bin> bins;
  for (int lo = lo_bin; lo <= hi_bin; lo += width) {
    Bin b;
    b.lo = lo;
    b.hi = lo + width;
    bins.push_back(b);
  }
  return bins;
}

}  // namespace

std::vector<HistogramBin> length_histogram(std::span<const SampleRecord> samples,
                                           const HistogramSpec& spec) {
  if (spec.bin_width < 1) throw ConfigError("bin_width must be >= 1");
  if (samples.empty()) return {};
  int lo_bin = bin_floor(samples[0].token_count, spec.bin_width);
  int hi_bin = lo_bin;
  for (const SampleRecord& s : samples) {
    int b = bin_floor(s.token_count, spec.bin_width);
    lo_bin = std::min(lo_bin, b);
    hi_bin = std::max(hi_bin, b);
  }
  auto bins = make_bin_range<HistogramBin>(lo_bin, hi_bin, spec.bin_width);
  for (const SampleRecord& s : samples) {
    bins[(bin_floor(s.token_count, spec.bin_width) - lo_bin) / spec.bin_width].count += 1;
  }
  return bins;
}

std::vector<SplitHistogramBin> length_histogram_confident(
    std::span<const SampleRecord> samples,
    const std::map<std::string, std::string>& gold_by_question,
    const HistogramSpec& spec) {
  if (spec.bin_width < 1) throw ConfigError("bin_width must be >= 1");

  std::map<std::string, std::vector<SampleRecord>> by_question;
  for (const SampleRecord& s : samples) by_question[s.question_id].push_back(s);

  struct Selected {
    int token_count;
    bool correct;
  };
  std::vector<Selected> selected;
  for (const auto& [qid, qsamples] : by_question) {
    auto gold_it = gold_by_question.find(qid);
    if (gold_it == gold_by_question.end())
      throw DataError("no gold answer for question '" + qid + "'");
    ConfidenceResult conf;
    try {
      conf = cal_confidence(qsamples);
    } catch (const EvalError&) {
      continue;  // nothing parsable for this question
    }
    bool correct = answers_equal(conf.answer, normalize_answer(gold_it->second));
    std::string key = conf.answer.key();
    for (const SampleRecord& s : qsamples) {
      if (!s.extracted_answer) continue;
      if (normalize_answer(*s.extracted_answer).key() == key)
        selected.push_back({s.token_count, correct});
    }
  }
  if (selected.empty()) return {};

  int lo_bin = bin_floor(selected[0].token_count, spec.bin_width);
  int hi_bin = lo_bin;
  for (const Selected& s : selected) {
    int b = bin_floor(s.token_count, spec.bin_width);
    lo_bin = std::min(lo_bin, b);
    hi_bin = std::max(hi_bin, b);
  }
  auto bins = make_bin_range<SplitHistogramBin>(lo_bin, hi_bin, spec.bin_width);
  for (const Selected& s : selected) {
    auto& bin = bins[(bin_floor(s.token_count, spec.bin_width) - lo_bin) / spec.bin_width];
    if (s.correct) bin.correct += 1;
    else bin.wrong += 1;
  }
  return bins;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) out << b.lo << "," << b.hi << "," << b.count << "\n";
  return out.str();
}

std::string histogram_csv(const std::vector<SplitHistogramBin>& bins) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,correct,wrong\n";
  for (const auto& b : bins)
    out << b.lo << "," << b.hi << "," << b.correct << "," << b.wrong << "\n";
  return out.str();
}

}  // namespace rtrim
