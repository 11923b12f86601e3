#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtrim/config_io.hpp"
#include "rtrim/dataset.hpp"
#include "rtrim/errors.hpp"
#include "rtrim/harness.hpp"
#include "rtrim/http_backend.hpp"
#include "rtrim/metrics.hpp"
#include "rtrim/scripted_backend.hpp"

namespace {

using namespace rtrim;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBackend = 2;
constexpr int kExitData = 3;

std::vector<long long> parse_budget_list(const std::string& text) {
  std::vector<long long> budgets;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    std::string token = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (token.empty()) throw ConfigError("empty entry in budget list");
    try {
      budgets.push_back(std::stoll(token));
    } catch (const std::exception&) {
      throw ConfigError("budget '" + token + "' is not an integer");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return budgets;
}

std::pair<int, int> parse_tau_range(const std::string& text) {
  size_t colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("tau filter must be INT or LO:HI");
  }
}

struct RunArgs {
  std::string method;
  std::string dataset;
  std::string backend;
  std::string scenario;
  std::string config;
  std::string out;
  bool resume = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> concurrency;
};

int do_run(const RunArgs& args) {
  RunConfigInput input;
  if (!args.config.empty()) input = load_config_file(args.config);

  auto method = parse_method(args.method);
  if (!method) throw ConfigError("unknown method '" + args.method + "'");
  input.method = method;
  if (args.seed) input.run_seed = *args.seed;
  if (args.concurrency) input.concurrency_cap = *args.concurrency;
  RunConfig cfg = validate_config(input);

  std::unique_ptr<SamplingBackend> backend;
  if (args.backend == "scripted") {
    if (args.scenario.empty())
      throw ConfigError("--backend scripted requires --scenario");
    backend = std::make_unique<ScriptedBackend>(ScriptedScenario::load(args.scenario),
                                                args.scenario);
  } else if (args.backend == "http") {
    backend = std::make_unique<HttpBackend>(HttpBackendConfig::from_env());
  } else {
    throw ConfigError("unknown backend '" + args.backend + "'");
  }

  std::vector<QuestionRecord> dataset = load_dataset(args.dataset);
  MetricsReport report =
      run(cfg, dataset, *backend, args.out, args.resume, args.dataset);

  std::cout << "questions " << report.questions << " (errors " << report.errors << ")\n"
            << "accuracy " << report.accuracy << "\n"
            << "mean_correct_length " << report.mean_correct_length << "\n"
            << "penalized_length " << report.penalized_len << " (gamma " << report.gamma
            << ")\n"
            << "aeu " << report.aeu_rescaled << "\n"
            << "total_samples " << report.total_samples << "\n"
            << "total_tokens " << report.total_tokens << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning-path trimming harness: shortest-correct-answer search, "
               "baselines and efficiency metrics over a chat-completions backend."};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute a method over a dataset");
  run_cmd->add_option("--method", run_args.method, "edit|dp|bon|st")->required();
  run_cmd->add_option("--dataset", run_args.dataset, "canonical dataset path")->required();
  run_cmd->add_option("--backend", run_args.backend, "http|scripted")->required();
  run_cmd->add_option("--scenario", run_args.scenario, "scenario file for the scripted backend");
  run_cmd->add_option("--config", run_args.config, "config JSON path");
  run_cmd->add_option("--out", run_args.out, "output run directory")->required();
  run_cmd->add_flag("--resume", run_args.resume, "skip questions already summarized");
  run_cmd->add_option("--seed", run_args.seed, "override run seed");
  run_cmd->add_option("--concurrency", run_args.concurrency, "cross-question parallelism");

  std::string report_dir;
  double report_gamma = 2.0;
  std::string report_budgets;
  CLI::App* report_cmd = app.add_subcommand("report", "Recompute metrics from a run log");
  report_cmd->add_option("--run", report_dir, "run directory")->required();
  report_cmd->add_option("--gamma", report_gamma, "wrong-answer penalty factor");
  report_cmd->add_option("--budgets", report_budgets, "comma-separated token budgets");

  std::string hist_dir;
  int hist_bin_width = 100;
  std::string hist_split = "all";
  std::string hist_tau;
  CLI::App* hist_cmd = app.add_subcommand("hist", "Emit length histograms from a run log");
  hist_cmd->add_option("--run", hist_dir, "run directory")->required();
  hist_cmd->add_option("--bin-width", hist_bin_width, "bin width in tokens");
  hist_cmd->add_option("--split", hist_split, "all|confident");
  hist_cmd->add_option("--tau", hist_tau, "only samples at this tau (INT or LO:HI; 0 = unconstrained)");

  std::string import_format;
  std::string import_in;
  std::string import_out;
  CLI::App* import_cmd = app.add_subcommand("import", "Convert a public dataset dump");
  import_cmd->add_option("--format", import_format, "gsm8k|math|aime")->required();
  import_cmd->add_option("--in", import_in, "input path")->required();
  import_cmd->add_option("--out", import_out, "canonical output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(run_cmd)) return do_run(run_args);

    if (app.got_subcommand(report_cmd)) {
      std::optional<BudgetSpec> budgets;
      if (!report_budgets.empty())
        budgets = make_budget_spec(parse_budget_list(report_budgets));
      if (report_gamma <= 1.0) throw ConfigError("gamma must be > 1");
      MetricsReport report = write_report(report_dir, report_gamma, budgets);
      std::cout << "accuracy " << report.accuracy << "\n"
                << "mean_correct_length " << report.mean_correct_length << "\n"
                << "penalized_length " << report.penalized_len << " (gamma "
                << report.gamma << ")\n"
                << "aeu " << report.aeu_rescaled << "\n";
      return kExitOk;
    }

    if (app.got_subcommand(hist_cmd)) {
      HistogramSplit split;
      if (hist_split == "all") split = HistogramSplit::all;
      else if (hist_split == "confident") split = HistogramSplit::correct_vs_wrong_most_confident;
      else throw ConfigError("--split must be all or confident");
      std::optional<std::pair<int, int>> tau_filter;
      if (!hist_tau.empty()) tau_filter = parse_tau_range(hist_tau);
      std::cout << write_histogram_file(hist_dir, hist_bin_width, split, tau_filter)
                << "\n";
      return kExitOk;
    }

    if (app.got_subcommand(import_cmd)) {
      auto format = parse_import_format(import_format);
      if (!format) throw ConfigError("unknown import format '" + import_format + "'");
      std::vector<QuestionRecord> records = import_dataset(*format, import_in);
      save_dataset(records, import_out);
      std::cout << "imported " << records.size() << " questions\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
