#include "rtrim/core.hpp"

#include <sstream>

#include "rtrim/errors.hpp"

namespace rtrim {

std::string method_name(Method m) {
  switch (m) {
    case Method::edit: return "edit";
    case Method::dp: return "dp";
    case Method::bon: return "bon";
    case Method::st: return "st";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "edit") return Method::edit;
  if (name == "dp") return Method::dp;
  if (name == "bon") return Method::bon;
  if (name == "st") return Method::st;
  return std::nullopt;
}

std::string lstat_mode_name(LstatMode m) {
  switch (m) {
    case LstatMode::composite: return "composite";
    case LstatMode::median_only: return "median_only";
    case LstatMode::minimum_only: return "minimum_only";
  }
  return "unknown";
}

std::optional<LstatMode> parse_lstat_mode(std::string_view name) {
  if (name == "composite") return LstatMode::composite;
  if (name == "median_only") return LstatMode::median_only;
  if (name == "minimum_only") return LstatMode::minimum_only;
  return std::nullopt;
}

RunConfig validate_config(const RunConfigInput& raw) {
  RunConfig cfg;
  if (raw.method) cfg.method = *raw.method;
  if (raw.total_budget) cfg.total_budget = *raw.total_budget;
  if (raw.max_iterations) cfg.max_iterations = *raw.max_iterations;
  if (raw.patience_init) cfg.patience_init = *raw.patience_init;
  if (raw.tau_min) cfg.tau_min = *raw.tau_min;
  if (raw.tau_max) cfg.tau_max = *raw.tau_max;
  if (raw.gamma) cfg.gamma = *raw.gamma;
  if (raw.eps_tol) cfg.eps_tol = *raw.eps_tol;
  if (raw.temperature) cfg.temperature = *raw.temperature;
  if (raw.top_p) cfg.top_p = *raw.top_p;
  if (raw.max_tokens) cfg.max_tokens = *raw.max_tokens;
  if (raw.concurrency_cap) cfg.concurrency_cap = *raw.concurrency_cap;
  if (raw.run_seed) cfg.run_seed = *raw.run_seed;
  if (raw.lstat_mode) cfg.lstat_mode = *raw.lstat_mode;

  if (cfg.max_iterations < 1) throw ConfigError("T must be >= 1");
  if (cfg.total_budget < cfg.max_iterations)
    throw ConfigError("N must be >= T so every iteration draws at least one sample");
  if (cfg.patience_init < 0) throw ConfigError("beta0 must be >= 0");
  if (cfg.tau_min < 1) throw ConfigError("tau_min must be >= 1");
  if (cfg.tau_max <= cfg.tau_min) throw ConfigError("tau_max must be > tau_min");
  if (cfg.gamma <= 1.0) throw ConfigError("gamma must be > 1");
  if (cfg.eps_tol < 0.0) throw ConfigError("eps_tol must be >= 0");
  if (cfg.temperature < 0.0) throw ConfigError("temperature must be >= 0");
  if (cfg.top_p <= 0.0 || cfg.top_p > 1.0)
    throw ConfigError("top_p must be in (0, 1]");
  if (cfg.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (cfg.concurrency_cap < 1) throw ConfigError("concurrency_cap must be >= 1");
  return cfg;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view question_id,
                          int iteration, int sample_index) {
  std::uint64_t h = mix64(run_seed ^ 0xa0761d6478bd642fULL);
  h = mix64(h ^ fnv1a(question_id));
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(iteration)));
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(sample_index)));
  return h;
}

}  // namespace rtrim
