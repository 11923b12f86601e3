#include "rtrim/http_backend.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rtrim/errors.hpp"

namespace rtrim {

namespace {

using nlohmann::json;

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

std::string body_snippet(const std::string& body) {
  if (body.size() <= 200) return body;
  return body.substr(0, 200) + "...";
}

}  // namespace

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig cfg;
  cfg.base_url = env_or("BACKEND_URL", "");
  cfg.api_key = env_or("BACKEND_API_KEY", "");
  cfg.model = env_or("BACKEND_MODEL", "");
  if (cfg.base_url.empty()) throw ConfigError("BACKEND_URL is not set");
  if (cfg.model.empty()) throw ConfigError("BACKEND_MODEL is not set");
  return cfg;
}

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.base_url.empty()) throw ConfigError("http backend needs a base url");
}

std::string HttpBackend::describe() const {
  return "http:" + cfg_.base_url + " model=" + cfg_.model;
}

Completion HttpBackend::request_one(const PromptRequest& request,
                                    std::uint64_t seed) const {
  json body;
  body["model"] = cfg_.model;
  body["messages"] = json::array({
      json{{"role", "system"}, {"content", request.system_text}},
      json{{"role", "user"}, {"content", request.user_text}},
  });
  body["n"] = 1;
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;
  body["max_tokens"] = request.max_tokens;
  body["seed"] = seed;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  std::string last_failure = "no attempt made";
  double backoff_ms = cfg_.initial_backoff_ms;

  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long long>(backoff_ms)));
      backoff_ms = std::min(backoff_ms * cfg_.backoff_multiplier,
                            static_cast<double>(cfg_.max_backoff_ms));
    }

    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    client.set_write_timeout(cfg_.timeout_seconds, 0);

    httplib::Result res =
        client.Post(cfg_.endpoint_path, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (retryable_status(res->status)) {
      last_failure = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProtocolError("backend returned status " + std::to_string(res->status) +
                          ": " + body_snippet(res->body));
    }

    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("unparsable backend response: ") + e.what());
    }
    try {
      const json& choice = reply.at("choices").at(0);
      Completion c;
      c.text = choice.at("message").at("content").get<std::string>();
      c.finish_reason = choice.value("finish_reason", "stop") == "length"
                            ? Completion::FinishReason::length
                            : Completion::FinishReason::stop;
      if (!reply.contains("usage") || !reply.at("usage").contains("completion_tokens"))
        throw ProtocolError("backend response carries no usage.completion_tokens");
      c.token_count = reply.at("usage").at("completion_tokens").get<int>();
      if (choice.contains("logprobs") && choice.at("logprobs").is_object() &&
          choice.at("logprobs").contains("content")) {
        double total = 0.0;
        for (const json& tok : choice.at("logprobs").at("content"))
          total += tok.value("logprob", 0.0);
        c.logprob_sum = total;
      }
      return c;
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("malformed backend response: ") + e.what());
    }
  }
  throw TransportError("backend unreachable after " +
                       std::to_string(cfg_.max_retries + 1) + " attempts (" +
                       last_failure + ")");
}

std::vector<Completion> HttpBackend::sample(const PromptRequest& request) {
  if (request.n < 1 || static_cast<size_t>(request.n) != request.seeds.size())
    throw BackendError("request n must match the number of seeds");

  const size_t n = request.seeds.size();
  std::vector<Completion> out(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<size_t> next{0};

  auto work = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        out[i] = request_one(request, request.seeds[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  size_t workers = std::min<size_t>(std::max(cfg_.max_in_flight, 1), n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace rtrim
