#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtrim/core.hpp"

namespace rtrim {

// Per-question result line. Summaries carry everything reports need, so a
// log is self-contained once every question has one.
struct LogSummary {
  std::string question_id;
  Method method = Method::edit;
  std::string gold_answer;
  std::optional<std::string> final_answer;
  bool correct = false;
  int selected_length = 0;
  int total_samples = 0;
  long long tokens_spent = 0;
  int iterations_used = 0;
  std::optional<std::string> error;
};

struct LoggedSample {
  SampleRecord sample;
  int attempt = 0;
};

struct LoggedHistory {
  std::string question_id;
  HistoryEntry entry;
  bool recorded = true;
  int attempt = 0;
};

// Line serialization. Key order is alphabetical and stable, so identical
// records serialize to identical bytes.
std::string sample_line(const SampleRecord& sample, int attempt);
std::string history_line(const std::string& question_id, const HistoryEntry& entry,
                         bool recorded, int attempt);
std::string summary_line(const LogSummary& summary);

struct RunLogContents {
  std::vector<LoggedSample> samples;
  std::vector<LoggedHistory> histories;
  std::vector<LogSummary> summaries;                 // file order
  std::map<std::string, LogSummary> summary_by_id;   // last one wins
  std::map<std::string, int> max_attempt;            // over sample/history lines
};

// Parses a run log. A trailing line cut off mid-record (a crash artifact) is
// ignored; any other malformed line raises DataError with its line number.
RunLogContents read_run_log(const std::string& path);

// Drops a trailing partial record so the file ends at a line boundary.
void repair_log_tail(const std::string& path);

// Serialized appender. One writer per run; callers append whole per-question
// blocks under their own lock.
class RunLogWriter {
 public:
  explicit RunLogWriter(const std::string& path);  // repairs the tail first

  void append_block(const std::vector<std::string>& lines);

 private:
  std::string path_;
};

}  // namespace rtrim
