#include "rtrim/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "rtrim/errors.hpp"

namespace rtrim {

BudgetSpec make_budget_spec(std::vector<long long> budgets) {
  if (budgets.empty()) throw ConfigError("budget list must not be empty");
  for (size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 0) throw ConfigError("budgets must be >= 0");
    if (i > 0 && budgets[i] <= budgets[i - 1])
      throw ConfigError("budgets must be strictly ascending");
  }
  return BudgetSpec{std::move(budgets)};
}

namespace {

void check_unique_ids(std::span<const QuestionOutcome> outcomes) {
  std::set<std::string_view> seen;
  for (const QuestionOutcome& o : outcomes) {
    if (!seen.insert(o.question_id).second)
      throw DataError("duplicate question id '" + o.question_id + "'");
  }
}

}  // namespace

double accuracy(std::span<const QuestionOutcome> outcomes) {
  if (outcomes.empty()) throw EvalError("accuracy of an empty outcome set");
  check_unique_ids(outcomes);
  long long correct = 0;
  for (const QuestionOutcome& o : outcomes) correct += o.correct ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

double mean_correct_length(std::span<const QuestionOutcome> outcomes) {
  long long total = 0;
  long long count = 0;
  for (const QuestionOutcome& o : outcomes) {
    if (!o.correct) continue;
    total += o.selected_length;
    count += 1;
  }
  if (count == 0) throw EvalError("undefined: no correct solutions");
  return static_cast<double>(total) / static_cast<double>(count);
}

double penalized_length(std::span<const QuestionOutcome> outcomes, double gamma) {
  if (gamma <= 1.0) throw ConfigError("gamma must be > 1");
  if (outcomes.empty()) throw EvalError("penalized length of an empty outcome set");
  long long correct_total = 0;
  long long wrong_count = 0;
  long long max_wrong = 0;
  for (const QuestionOutcome& o : outcomes) {
    if (o.correct) {
      correct_total += o.selected_length;
    } else {
      wrong_count += 1;
      max_wrong = std::max(max_wrong, static_cast<long long>(o.selected_length));
    }
  }
  double penalty =
      gamma * static_cast<double>(wrong_count) * static_cast<double>(max_wrong);
  return (static_cast<double>(correct_total) + penalty) /
         static_cast<double>(outcomes.size());
}

double aeu(double acc, double l_pen) {
  if (l_pen <= 0.0) throw EvalError("effective length must be positive");
  return acc / l_pen;
}

std::vector<std::pair<long long, double>> bca_curve(
    std::span<const QuestionOutcome> outcomes, const BudgetSpec& budgets) {
  if (outcomes.empty()) throw EvalError("bca curve of an empty outcome set");
  check_unique_ids(outcomes);
  std::vector<std::pair<long long, double>> curve;
  curve.reserve(budgets.budgets.size());
  for (long long budget : budgets.budgets) {
    long long correct = 0;
    for (const QuestionOutcome& o : outcomes)
      if (o.correct && o.selected_length <= budget) correct += 1;
    curve.emplace_back(budget, static_cast<double>(correct) /
                                   static_cast<double>(outcomes.size()));
  }
  return curve;
}

std::string bca_csv(const std::vector<std::pair<long long, double>>& curve) {
  std::ostringstream out;
  out << "budget,accuracy\n";
  for (const auto& [budget, acc] : curve) {
    std::ostringstream value;
    value.precision(10);
    value << acc;
    out << budget << "," << value.str() << "\n";
  }
  return out.str();
}

}  // namespace rtrim
