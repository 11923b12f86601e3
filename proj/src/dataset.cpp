#include "rtrim/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rtrim/errors.hpp"
#include "rtrim/extraction.hpp"

namespace rtrim {

namespace {

using nlohmann::json;

DataError line_error(const std::string& path, size_t line_no, const std::string& what) {
  return DataError(path + ":" + std::to_string(line_no) + ": " + what);
}

json parse_line(const std::string& path, size_t line_no, const std::string& line) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw line_error(path, line_no, "expected a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw line_error(path, line_no, e.what());
  }
}

std::string require_string(const std::string& path, size_t line_no, const json& j,
                           const std::string& field) {
  if (!j.contains(field) || !j.at(field).is_string())
    throw line_error(path, line_no, "missing string field '" + field + "'");
  return j.at(field).get<std::string>();
}

}  // namespace

std::vector<QuestionRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");

  std::vector<QuestionRecord> records;
  std::set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse_line(path, line_no, line);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "id" && it.key() != "question" && it.key() != "answer")
        throw line_error(path, line_no, "unexpected field '" + it.key() + "'");
    }
    QuestionRecord q;
    q.id = require_string(path, line_no, j, "id");
    q.prompt_text = require_string(path, line_no, j, "question");
    std::string answer = require_string(path, line_no, j, "answer");
    if (q.id.empty()) throw line_error(path, line_no, "empty id");
    if (q.prompt_text.empty()) throw line_error(path, line_no, "empty question");
    try {
      q.gold_answer = normalize_answer(answer).text;
    } catch (const EvalError&) {
      throw line_error(path, line_no, "empty answer");
    }
    if (!ids.insert(q.id).second)
      throw line_error(path, line_no, "duplicate id '" + q.id + "'");
    records.push_back(std::move(q));
  }
  if (records.empty()) throw DataError("dataset '" + path + "' has no records");
  return records;
}

void save_dataset(const std::vector<QuestionRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write dataset '" + path + "'");
  for (const QuestionRecord& q : records) {
    json j;
    j["id"] = q.id;
    j["question"] = q.prompt_text;
    j["answer"] = q.gold_answer;
    out << j.dump() << "\n";
  }
}

std::optional<ImportFormat> parse_import_format(std::string_view name) {
  if (name == "gsm8k") return ImportFormat::gsm8k;
  if (name == "math") return ImportFormat::math;
  if (name == "aime") return ImportFormat::aime;
  return std::nullopt;
}

namespace {

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string gsm8k_final_answer(const std::string& path, size_t line_no,
                               const std::string& rationale) {
  size_t marker = rationale.rfind("####");
  if (marker == std::string::npos)
    throw line_error(path, line_no, "gsm8k answer has no #### marker");
  return trim_copy(rationale.substr(marker + 4));
}

std::string fallback_id(const char* prefix, size_t line_no) {
  std::ostringstream id;
  id << prefix << "-" << line_no;
  return id.str();
}

}  // namespace

std::vector<QuestionRecord> import_dataset(ImportFormat format, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input '" + path + "'");

  std::vector<QuestionRecord> records;
  std::set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse_line(path, line_no, line);

    QuestionRecord q;
    switch (format) {
      case ImportFormat::gsm8k: {
        q.prompt_text = require_string(path, line_no, j, "question");
        std::string rationale = require_string(path, line_no, j, "answer");
        q.gold_answer = gsm8k_final_answer(path, line_no, rationale);
        q.id = j.contains("id") && j.at("id").is_string()
                   ? j.at("id").get<std::string>()
                   : fallback_id("gsm8k", line_no);
        break;
      }
      case ImportFormat::math: {
        q.prompt_text = require_string(path, line_no, j, "problem");
        if (j.contains("answer") && j.at("answer").is_string()) {
          q.gold_answer = j.at("answer").get<std::string>();
        } else {
          std::string solution = require_string(path, line_no, j, "solution");
          auto boxed = extract_answer(solution);
          if (!boxed)
            throw line_error(path, line_no, "math solution has no boxed answer");
          q.gold_answer = *boxed;
        }
        q.id = j.contains("unique_id") && j.at("unique_id").is_string()
                   ? j.at("unique_id").get<std::string>()
                   : fallback_id("math", line_no);
        break;
      }
      case ImportFormat::aime: {
        q.prompt_text = j.contains("problem") && j.at("problem").is_string()
                            ? j.at("problem").get<std::string>()
                            : require_string(path, line_no, j, "question");
        if (j.contains("answer") && j.at("answer").is_number_integer()) {
          q.gold_answer = std::to_string(j.at("answer").get<long long>());
        } else {
          q.gold_answer = require_string(path, line_no, j, "answer");
        }
        q.id = j.contains("id") && j.at("id").is_string()
                   ? j.at("id").get<std::string>()
                   : fallback_id("aime", line_no);
        break;
      }
    }

    try {
      q.gold_answer = normalize_answer(q.gold_answer).text;
    } catch (const EvalError&) {
      throw line_error(path, line_no, "empty answer after normalization");
    }
    if (q.prompt_text.empty()) throw line_error(path, line_no, "empty question");
    if (!ids.insert(q.id).second)
      throw line_error(path, line_no, "duplicate id '" + q.id + "'");
    records.push_back(std::move(q));
  }
  if (records.empty()) throw DataError("input '" + path + "' has no records");
  return records;
}

}  // namespace rtrim
