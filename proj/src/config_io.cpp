#include "rtrim/config_io.hpp"

#include <fstream>

#include "rtrim/errors.hpp"

namespace rtrim {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfigInput config_input_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "method",   "N",     "T",          "beta0",      "tau_min",
      "tau_max",  "gamma", "eps_tol",    "temperature", "top_p",
      "max_tokens", "concurrency_cap", "run_seed",    "lstat_mode"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config field '" + it.key() + "'");
  }

  RunConfigInput input;
  if (j.contains("method")) {
    auto m = parse_method(j.at("method").get<std::string>());
    if (!m) throw ConfigError("unknown method '" + j.at("method").get<std::string>() + "'");
    input.method = m;
  }
  read_field(j, "N", input.total_budget);
  read_field(j, "T", input.max_iterations);
  read_field(j, "beta0", input.patience_init);
  read_field(j, "tau_min", input.tau_min);
  read_field(j, "tau_max", input.tau_max);
  read_field(j, "gamma", input.gamma);
  read_field(j, "eps_tol", input.eps_tol);
  read_field(j, "temperature", input.temperature);
  read_field(j, "top_p", input.top_p);
  read_field(j, "max_tokens", input.max_tokens);
  read_field(j, "concurrency_cap", input.concurrency_cap);
  read_field(j, "run_seed", input.run_seed);
  if (j.contains("lstat_mode")) {
    auto m = parse_lstat_mode(j.at("lstat_mode").get<std::string>());
    if (!m)
      throw ConfigError("unknown lstat_mode '" + j.at("lstat_mode").get<std::string>() + "'");
    input.lstat_mode = m;
  }
  return input;
}

RunConfigInput load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_input_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  json j;
  j["method"] = method_name(cfg.method);
  j["N"] = cfg.total_budget;
  j["T"] = cfg.max_iterations;
  j["beta0"] = cfg.patience_init;
  j["tau_min"] = cfg.tau_min;
  j["tau_max"] = cfg.tau_max;
  j["gamma"] = cfg.gamma;
  j["eps_tol"] = cfg.eps_tol;
  j["temperature"] = cfg.temperature;
  j["top_p"] = cfg.top_p;
  j["max_tokens"] = cfg.max_tokens;
  j["concurrency_cap"] = cfg.concurrency_cap;
  j["run_seed"] = cfg.run_seed;
  j["lstat_mode"] = lstat_mode_name(cfg.lstat_mode);
  return j;
}

}  // namespace rtrim
