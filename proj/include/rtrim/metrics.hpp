#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rtrim/core.hpp"

namespace rtrim {

// The method's single emitted response for one question.
struct QuestionOutcome {
  std::string question_id;
  bool correct = false;
  int selected_length = 0;  // tokens
  Method method = Method::edit;
};

// Strictly ascending token budgets for the budget-constrained accuracy curve.
struct BudgetSpec {
  std::vector<long long> budgets;
};

BudgetSpec make_budget_spec(std::vector<long long> budgets);  // validates

// Fraction of correct outcomes. Throws DataError on duplicate question ids.
double accuracy(std::span<const QuestionOutcome> outcomes);

// Mean selected length over correct outcomes only.
// Throws EvalError("undefined: no correct solutions") when none are correct.
double mean_correct_length(std::span<const QuestionOutcome> outcomes);

// Effective length charging every wrong answer gamma times the longest wrong
// response: (sum of correct lengths + gamma * wrong_count * max_wrong) / |D|.
double penalized_length(std::span<const QuestionOutcome> outcomes, double gamma);

// Accuracy per effective length, a plain ratio. Published tables feed
// accuracy in percent and rescale by 100 for readability.
double aeu(double acc, double l_pen);

// Accuracy when responses longer than the budget count as wrong; one point
// per budget, non-decreasing in the budget.
std::vector<std::pair<long long, double>> bca_curve(
    std::span<const QuestionOutcome> outcomes, const BudgetSpec& budgets);

// CSV emission with header `budget,accuracy`.
std::string bca_csv(const std::vector<std::pair<long long, double>>& curve);

}  // namespace rtrim
