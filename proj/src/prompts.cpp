#include <string>

#include "rtrim/backend.hpp"
#include "rtrim/errors.hpp"

namespace rtrim {

const std::string kSystemPrompt = "You are a careful math assistant.";

namespace {

const std::string kBoxInstruction =
    "You must output the final answer in a box \"\\boxed{final_answer}\".";

std::string replace_all(std::string text, const std::string& slot,
                        const std::string& value) {
  size_t pos = 0;
  while ((pos = text.find(slot, pos)) != std::string::npos) {
    text.replace(pos, slot.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

std::string render_constrained_prompt(const std::string& question, int num_step) {
  if (num_step < 1) throw ConfigError("num_step must be >= 1");
  if (question.empty()) throw DataError("empty question");
  std::string body =
      "Solve the given math problem step by step. " + kBoxInstruction +
      " You are limited to at most {num_step} reasoning steps. "
      "Stop generating immediately and output the answer if you reach the "
      "maximum {num_step} steps or obtained the final answer early.\n\n"
      "Question: {question}\n\nSolution:";
  body = replace_all(std::move(body), "{num_step}", std::to_string(num_step));
  return replace_all(std::move(body), "{question}", question);
}

std::string render_unconstrained_prompt(const std::string& question) {
  if (question.empty()) throw DataError("empty question");
  std::string body = "Solve the given math problem step by step. " + kBoxInstruction +
                     "\n\nQuestion: {question}\n\nSolution:";
  return replace_all(std::move(body), "{question}", question);
}

std::string render_prune_prompt(const std::string& solution) {
  if (solution.empty()) throw DataError("empty solution");
  std::string body =
      "Prune the following solution into the shortest version that is still "
      "complete and correct. Keep only the steps needed to justify the result "
      "and do not change the final answer. " +
      kBoxInstruction + "\n\nSolution: {solution}\n\nPruned solution:";
  return replace_all(std::move(body), "{solution}", solution);
}

}  // namespace rtrim
