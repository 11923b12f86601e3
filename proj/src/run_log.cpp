#include "rtrim/run_log.hpp"

#include <filesystem>
#include <fstream>

#include "rtrim/errors.hpp"

namespace rtrim {

namespace {

using nlohmann::json;

json tau_to_json(const std::optional<int>& tau) {
  if (tau) return *tau;
  return "unconstrained";
}

std::optional<int> tau_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "unconstrained")
      throw DataError("tau must be an integer or \"unconstrained\"");
    return std::nullopt;
  }
  return j.get<int>();
}

Method method_from_json(const json& j) {
  auto m = parse_method(j.get<std::string>());
  if (!m) throw DataError("unknown method '" + j.get<std::string>() + "'");
  return *m;
}

}  // namespace

std::string sample_line(const SampleRecord& sample, int attempt) {
  json j;
  j["type"] = "sample";
  j["attempt"] = attempt;
  j["question_id"] = sample.question_id;
  j["method"] = method_name(sample.method);
  j["iteration"] = sample.iteration;
  j["sample_index"] = sample.sample_index;
  j["tau"] = tau_to_json(sample.tau);
  j["token_count"] = sample.token_count;
  j["seed"] = sample.seed;
  if (sample.extracted_answer) j["extracted_answer"] = *sample.extracted_answer;
  else j["extracted_answer"] = nullptr;
  if (sample.logprob_sum) j["logprob_sum"] = *sample.logprob_sum;
  else j["logprob_sum"] = nullptr;
  j["completion_text"] = sample.completion_text;
  return j.dump();
}

std::string history_line(const std::string& question_id, const HistoryEntry& entry,
                         bool recorded, int attempt) {
  json j;
  j["type"] = "history";
  j["attempt"] = attempt;
  j["question_id"] = question_id;
  j["iteration"] = entry.iteration;
  j["tau"] = entry.tau;
  j["answer"] = entry.answer;
  j["confidence"] = entry.confidence;
  j["lstat"] = entry.lstat;
  j["vote_count"] = entry.vote_count;
  j["recorded"] = recorded;
  return j.dump();
}

std::string summary_line(const LogSummary& summary) {
  json j;
  j["type"] = "summary";
  j["question_id"] = summary.question_id;
  j["method"] = method_name(summary.method);
  j["gold_answer"] = summary.gold_answer;
  if (summary.final_answer) j["final_answer"] = *summary.final_answer;
  else j["final_answer"] = nullptr;
  j["correct"] = summary.correct;
  j["selected_length"] = summary.selected_length;
  j["total_samples"] = summary.total_samples;
  j["tokens_spent"] = summary.tokens_spent;
  j["iterations_used"] = summary.iterations_used;
  if (summary.error) j["error"] = *summary.error;
  else j["error"] = nullptr;
  return j.dump();
}

namespace {

LoggedSample sample_from_json(const json& j) {
  LoggedSample out;
  out.attempt = j.at("attempt").get<int>();
  out.sample.question_id = j.at("question_id").get<std::string>();
  out.sample.method = method_from_json(j.at("method"));
  out.sample.iteration = j.at("iteration").get<int>();
  out.sample.sample_index = j.at("sample_index").get<int>();
  out.sample.tau = tau_from_json(j.at("tau"));
  out.sample.token_count = j.at("token_count").get<int>();
  out.sample.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("extracted_answer").is_null())
    out.sample.extracted_answer = j.at("extracted_answer").get<std::string>();
  if (!j.at("logprob_sum").is_null())
    out.sample.logprob_sum = j.at("logprob_sum").get<double>();
  out.sample.completion_text = j.at("completion_text").get<std::string>();
  return out;
}

LoggedHistory history_from_json(const json& j) {
  LoggedHistory out;
  out.attempt = j.at("attempt").get<int>();
  out.question_id = j.at("question_id").get<std::string>();
  out.entry.iteration = j.at("iteration").get<int>();
  out.entry.tau = j.at("tau").get<int>();
  out.entry.answer = j.at("answer").get<std::string>();
  out.entry.confidence = j.at("confidence").get<double>();
  out.entry.lstat = j.at("lstat").get<double>();
  out.entry.vote_count = j.at("vote_count").get<int>();
  out.recorded = j.at("recorded").get<bool>();
  return out;
}

LogSummary summary_from_json(const json& j) {
  LogSummary out;
  out.question_id = j.at("question_id").get<std::string>();
  out.method = method_from_json(j.at("method"));
  out.gold_answer = j.at("gold_answer").get<std::string>();
  if (!j.at("final_answer").is_null())
    out.final_answer = j.at("final_answer").get<std::string>();
  out.correct = j.at("correct").get<bool>();
  out.selected_length = j.at("selected_length").get<int>();
  out.total_samples = j.at("total_samples").get<int>();
  out.tokens_spent = j.at("tokens_spent").get<long long>();
  out.iterations_used = j.at("iterations_used").get<int>();
  if (!j.at("error").is_null()) out.error = j.at("error").get<std::string>();
  return out;
}

}  // namespace

RunLogContents read_run_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run log '" + path + "'");

  RunLogContents contents;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    bool final_line = in.peek() == std::ifstream::traits_type::eof();
    json j;
    try {
      j = json::parse(line);
      std::string type = j.at("type").get<std::string>();
      if (type == "sample") {
        LoggedSample s = sample_from_json(j);
        int& attempt = contents.max_attempt[s.sample.question_id];
        attempt = std::max(attempt, s.attempt);
        contents.samples.push_back(std::move(s));
      } else if (type == "history") {
        LoggedHistory h = history_from_json(j);
        int& attempt = contents.max_attempt[h.question_id];
        attempt = std::max(attempt, h.attempt);
        contents.histories.push_back(std::move(h));
      } else if (type == "summary") {
        LogSummary s = summary_from_json(j);
        contents.summary_by_id[s.question_id] = s;
        contents.summaries.push_back(std::move(s));
      } else {
        throw DataError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      if (final_line) break;  // crash artifact, resume re-runs the question
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return contents;
}

void repair_log_tail(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  if (data.empty() || data.back() == '\n') return;
  size_t cut = data.find_last_of('\n');
  std::uintmax_t keep = (cut == std::string::npos) ? 0 : cut + 1;
  fs::resize_file(path, keep);
}

RunLogWriter::RunLogWriter(const std::string& path) : path_(path) {
  repair_log_tail(path_);
}

void RunLogWriter::append_block(const std::vector<std::string>& lines) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw DataError("cannot append to run log '" + path_ + "'");
  for (const std::string& line : lines) out << line << "\n";
  out.flush();
  if (!out.good()) throw DataError("failed writing run log '" + path_ + "'");
}

}  // namespace rtrim
