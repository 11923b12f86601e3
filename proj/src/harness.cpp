#include "rtrim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "rtrim/baselines.hpp"
#include "rtrim/config_io.hpp"
#include "rtrim/errors.hpp"
#include "rtrim/extraction.hpp"
#include "rtrim/search.hpp"

namespace rtrim {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kCodeVersion = "0.1.0";

std::string iso_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Buffers serialized record lines so a question's block reaches the log in
// one append.
class BlockObserver : public SearchObserver {
 public:
  BlockObserver(std::string question_id, int attempt)
      : question_id_(std::move(question_id)), attempt_(attempt) {}

  void on_sample(const SampleRecord& s) override {
    lines.push_back(sample_line(s, attempt_));
    samples_ += 1;
    tokens_ += s.token_count;
  }

  void on_history(const HistoryEntry& e, bool recorded) override {
    lines.push_back(history_line(question_id_, e, recorded, attempt_));
  }

  int samples() const { return samples_; }
  long long tokens() const { return tokens_; }

  std::vector<std::string> lines;

 private:
  std::string question_id_;
  int attempt_;
  int samples_ = 0;
  long long tokens_ = 0;
};

LogSummary execute_question(const QuestionRecord& question, SamplingBackend& backend,
                            const RunConfig& cfg, BlockObserver& observer,
                            bool& backend_failure) {
  LogSummary summary;
  summary.question_id = question.id;
  summary.method = cfg.method;
  summary.gold_answer = question.gold_answer;
  backend_failure = false;

  try {
    std::optional<CanonicalAnswer> final_answer;
    switch (cfg.method) {
      case Method::edit: {
        SearchResult r = dual_goal_search(question, backend, cfg, &observer);
        final_answer = r.final_answer;
        summary.selected_length = r.selected_response.token_count;
        summary.iterations_used = r.iterations_used;
        break;
      }
      case Method::dp: {
        BaselineResult r = run_dp(question, backend, cfg, &observer);
        final_answer = r.final_answer;
        if (r.selected_response) summary.selected_length = r.selected_response->token_count;
        summary.iterations_used = 1;
        break;
      }
      case Method::bon: {
        BaselineResult r = run_bon(question, backend, cfg, &observer);
        final_answer = r.final_answer;
        if (r.selected_response) summary.selected_length = r.selected_response->token_count;
        summary.iterations_used = 1;
        break;
      }
      case Method::st: {
        BaselineResult r = run_st(question, backend, cfg, &observer);
        final_answer = r.final_answer;
        if (r.selected_response) summary.selected_length = r.selected_response->token_count;
        summary.iterations_used = 2;
        break;
      }
    }
    if (final_answer) {
      summary.final_answer = final_answer->text;
      summary.correct =
          answers_equal(*final_answer, normalize_answer(question.gold_answer));
    }
  } catch (const BackendError& e) {
    backend_failure = true;
    summary.error = e.what();
    summary.correct = false;
    summary.final_answer.reset();
    summary.selected_length = 0;
  } catch (const std::exception& e) {
    summary.error = e.what();
    summary.correct = false;
    summary.final_answer.reset();
    summary.selected_length = 0;
  }
  summary.total_samples = observer.samples();
  summary.tokens_spent = observer.tokens();
  return summary;
}

json report_to_json(const MetricsReport& r) {
  json j;
  j["questions"] = r.questions;
  j["errors"] = r.errors;
  j["accuracy"] = r.accuracy;
  j["mean_correct_length"] = r.mean_correct_length;
  j["penalized_length"] = r.penalized_len;
  j["gamma"] = r.gamma;
  j["aeu"] = r.aeu_rescaled;
  j["total_samples"] = r.total_samples;
  j["total_tokens"] = r.total_tokens;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return j;
}

}  // namespace

RunPaths RunPaths::in(const std::string& dir) {
  RunPaths p;
  p.dir = dir;
  p.log = (fs::path(dir) / "run_log.jsonl").string();
  p.manifest = (fs::path(dir) / "manifest.json").string();
  p.metrics = (fs::path(dir) / "metrics.json").string();
  return p;
}

MetricsReport metrics_from_summaries(const std::vector<LogSummary>& summaries,
                                     double gamma) {
  if (summaries.empty()) throw DataError("no question summaries");
  std::vector<QuestionOutcome> outcomes;
  outcomes.reserve(summaries.size());
  MetricsReport report;
  report.gamma = gamma;
  for (const LogSummary& s : summaries) {
    QuestionOutcome o;
    o.question_id = s.question_id;
    o.correct = s.correct;
    o.selected_length = s.selected_length;
    o.method = s.method;
    outcomes.push_back(std::move(o));
    report.total_samples += s.total_samples;
    report.total_tokens += s.tokens_spent;
    if (s.error) report.errors += 1;
  }
  report.questions = summaries.size();
  report.accuracy = accuracy(outcomes);
  report.mean_correct_length = mean_correct_length(outcomes);
  report.penalized_len = penalized_length(outcomes, gamma);
  report.aeu_rescaled = aeu(report.accuracy * 100.0, report.penalized_len) * 100.0;
  return report;
}

MetricsReport run(const RunConfig& cfg, const std::vector<QuestionRecord>& dataset,
                  SamplingBackend& backend, const std::string& out_dir, bool resume,
                  const std::string& dataset_path) {
  if (dataset.empty()) throw DataError("empty dataset");
  fs::create_directories(out_dir);
  RunPaths paths = RunPaths::in(out_dir);

  json cfg_json = config_to_json(cfg);
  if (fs::exists(paths.manifest)) {
    if (!resume)
      throw DataError("run directory '" + out_dir + "' already holds a run; use resume");
    json manifest = read_json_file(paths.manifest);
    if (manifest.value("config", json::object()) != cfg_json)
      throw DataError("resume config does not match the original run");
  } else {
    if (fs::exists(paths.log))
      throw DataError("run log without manifest in '" + out_dir + "'");
    json manifest;
    manifest["run_id"] = fs::path(out_dir).filename().string() + "-" + iso_utc_now();
    manifest["config"] = cfg_json;
    manifest["dataset_path"] = dataset_path;
    manifest["backend"] = backend.describe();
    manifest["system_prompt"] = kSystemPrompt;
    manifest["created_at"] = iso_utc_now();
    manifest["code_version"] = kCodeVersion;
    write_json_file(paths.manifest, manifest);
  }

  RunLogContents prior;
  if (fs::exists(paths.log)) prior = read_run_log(paths.log);

  std::map<std::string, LogSummary> summaries = prior.summary_by_id;
  std::vector<const QuestionRecord*> pending;
  for (const QuestionRecord& q : dataset)
    if (!summaries.count(q.id)) pending.push_back(&q);

  RunLogWriter writer(paths.log);
  std::mutex io_mutex;
  std::atomic<size_t> next{0};
  std::atomic<size_t> failed{0};
  std::atomic<size_t> backend_failures{0};
  std::string first_backend_error;

  auto work = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= pending.size()) break;
      const QuestionRecord& q = *pending[i];
      auto prior_attempt = prior.max_attempt.find(q.id);
      int attempt = prior_attempt == prior.max_attempt.end() ? 0
                                                             : prior_attempt->second + 1;
      BlockObserver observer(q.id, attempt);
      bool backend_failure = false;
      LogSummary summary = execute_question(q, backend, cfg, observer, backend_failure);
      observer.lines.push_back(summary_line(summary));
      std::lock_guard<std::mutex> lock(io_mutex);
      writer.append_block(observer.lines);
      if (summary.error) failed.fetch_add(1);
      if (backend_failure) {
        if (backend_failures.fetch_add(1) == 0) first_backend_error = *summary.error;
      }
      summaries[q.id] = std::move(summary);
    }
  };

  size_t worker_count =
      std::min<size_t>(std::max(cfg.concurrency_cap, 1), std::max<size_t>(pending.size(), 1));
  if (worker_count <= 1) {
    work();
  } else {
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (size_t i = 0; i < worker_count; ++i) workers.emplace_back(work);
    for (auto& w : workers) w.join();
  }

  // A run that failed wholesale on the backend is an outage, not a set of
  // per-question accidents; the log stays intact for a later resume.
  if (!pending.empty() && failed == pending.size() && backend_failures > 0)
    throw TransportError("every question failed; first backend error: " +
                         first_backend_error);

  std::vector<LogSummary> ordered;
  ordered.reserve(dataset.size());
  for (const QuestionRecord& q : dataset) {
    auto it = summaries.find(q.id);
    if (it != summaries.end()) ordered.push_back(it->second);
  }
  MetricsReport report = metrics_from_summaries(ordered, cfg.gamma);
  write_json_file(paths.metrics, report_to_json(report));
  return report;
}

MetricsReport write_report(const std::string& run_dir, double gamma,
                           const std::optional<BudgetSpec>& budgets) {
  RunPaths paths = RunPaths::in(run_dir);
  RunLogContents contents = read_run_log(paths.log);
  if (contents.summary_by_id.empty()) throw DataError("run log has no summaries");

  std::vector<LogSummary> ordered;
  ordered.reserve(contents.summary_by_id.size());
  for (const auto& [id, summary] : contents.summary_by_id) ordered.push_back(summary);

  MetricsReport report = metrics_from_summaries(ordered, gamma);
  write_json_file((fs::path(run_dir) / "report.json").string(), report_to_json(report));

  if (budgets) {
    std::vector<QuestionOutcome> outcomes;
    outcomes.reserve(ordered.size());
    for (const LogSummary& s : ordered) {
      outcomes.push_back({s.question_id, s.correct, s.selected_length, s.method});
    }
    auto curve = bca_curve(outcomes, *budgets);
    std::ofstream out(fs::path(run_dir) / "bca.csv", std::ios::trunc);
    if (!out) throw DataError("cannot write bca.csv");
    out << bca_csv(curve);
  }
  return report;
}

std::vector<SampleRecord> effective_samples(const RunLogContents& contents) {
  std::vector<SampleRecord> out;
  for (const LoggedSample& s : contents.samples) {
    if (!contents.summary_by_id.count(s.sample.question_id)) continue;
    auto it = contents.max_attempt.find(s.sample.question_id);
    if (it != contents.max_attempt.end() && s.attempt != it->second) continue;
    out.push_back(s.sample);
  }
  return out;
}

std::string write_histogram_file(const std::string& run_dir, int bin_width,
                                 HistogramSplit split,
                                 std::optional<std::pair<int, int>> tau_filter) {
  RunPaths paths = RunPaths::in(run_dir);
  RunLogContents contents = read_run_log(paths.log);

  std::vector<SampleRecord> samples = effective_samples(contents);
  if (tau_filter) {
    auto [lo, hi] = *tau_filter;
    std::erase_if(samples, [lo, hi](const SampleRecord& s) {
      if (lo == 0 && hi == 0) return s.tau.has_value();
      return !s.tau || *s.tau < lo || *s.tau > hi;
    });
  }

  HistogramSpec spec;
  spec.bin_width = bin_width;
  spec.split = split;

  std::string path;
  std::string csv;
  if (split == HistogramSplit::all) {
    csv = histogram_csv(length_histogram(samples, spec));
    path = (fs::path(run_dir) / "hist_all.csv").string();
  } else {
    std::map<std::string, std::string> gold;
    for (const auto& [id, summary] : contents.summary_by_id)
      gold[id] = summary.gold_answer;
    csv = histogram_csv(length_histogram_confident(samples, gold, spec));
    path = (fs::path(run_dir) / "hist_confident.csv").string();
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << csv;
  return path;
}

}  // namespace rtrim
