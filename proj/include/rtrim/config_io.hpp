#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "rtrim/core.hpp"

namespace rtrim {

// Config file keys: method, N, T, beta0, tau_min, tau_max, gamma, eps_tol,
// temperature, top_p, max_tokens, concurrency_cap, run_seed, lstat_mode.
RunConfigInput config_input_from_json(const nlohmann::json& j);
RunConfigInput load_config_file(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace rtrim
