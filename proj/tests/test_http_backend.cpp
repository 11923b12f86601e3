#include <doctest.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rtrim/errors.hpp"
#include "rtrim/http_backend.hpp"

using namespace rtrim;
using nlohmann::json;

namespace {

// Local chat-completions stand-in with a scriptable handler.
class LocalServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit LocalServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   ++hits;
                   handler_(req, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this]() { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~LocalServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> hits{0};

 private:
  httplib::Server server_;
  Handler handler_;
  int port_ = 0;
  std::thread thread_;
};

json ok_reply(const std::string& text, int completion_tokens,
              const std::string& finish = "stop") {
  json reply;
  reply["choices"] = json::array({json{
      {"message", json{{"role", "assistant"}, {"content", text}}},
      {"finish_reason", finish},
  }});
  reply["usage"] = json{{"prompt_tokens", 10}, {"completion_tokens", completion_tokens}};
  return reply;
}

HttpBackendConfig test_config(const std::string& url) {
  HttpBackendConfig cfg;
  cfg.base_url = url;
  cfg.api_key = "test-key";
  cfg.model = "test-model";
  cfg.max_retries = 2;
  cfg.initial_backoff_ms = 1;
  cfg.max_backoff_ms = 4;
  cfg.max_in_flight = 4;
  return cfg;
}

PromptRequest request_with_seeds(int n) {
  PromptRequest req;
  req.system_text = "system";
  req.user_text = "user";
  req.n = n;
  req.temperature = 0.7;
  req.top_p = 0.9;
  req.max_tokens = 256;
  for (int i = 0; i < n; ++i) req.seeds.push_back(1000 + i);
  return req;
}

}  // namespace

TEST_CASE("http backend sends one seeded request per sample") {
  std::vector<json> bodies;
  std::mutex bodies_mutex;
  LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard<std::mutex> lock(bodies_mutex);
      bodies.push_back(json::parse(req.body));
    }
    json body = json::parse(req.body);
    std::uint64_t seed = body.at("seed").get<std::uint64_t>();
    res.set_content(ok_reply("answer \\boxed{" + std::to_string(seed) + "}",
                             static_cast<int>(seed % 100))
                        .dump(),
                    "application/json");
  });

  HttpBackend backend(test_config(server.url()));
  auto out = backend.sample(request_with_seeds(3));

  REQUIRE(out.size() == 3);
  CHECK(server.hits == 3);
  // Responses line up with the seed order, not arrival order.
  for (int i = 0; i < 3; ++i) {
    CHECK(out[i].text.find(std::to_string(1000 + i)) != std::string::npos);
    CHECK(out[i].token_count == (1000 + i) % 100);
  }
  for (const json& body : bodies) {
    CHECK(body.at("model") == "test-model");
    CHECK(body.at("n") == 1);
    CHECK(body.at("messages").size() == 2);
    CHECK(body.at("max_tokens") == 256);
  }
}

TEST_CASE("http backend forwards auth and reads finish_reason") {
  std::string auth_seen;
  LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
    auth_seen = req.get_header_value("Authorization");
    res.set_content(ok_reply("cut off mid", 256, "length").dump(), "application/json");
  });
  HttpBackend backend(test_config(server.url()));
  auto out = backend.sample(request_with_seeds(1));
  CHECK(auth_seen == "Bearer test-key");
  CHECK(out[0].finish_reason == Completion::FinishReason::length);
}

TEST_CASE("a missing usage report is a protocol error, not a fallback") {
  LocalServer server([](const httplib::Request&, httplib::Response& res) {
    json reply = ok_reply("fine", 10);
    reply.erase("usage");
    res.set_content(reply.dump(), "application/json");
  });
  HttpBackend backend(test_config(server.url()));
  CHECK_THROWS_AS(backend.sample(request_with_seeds(1)), ProtocolError);
}

TEST_CASE("transient 5xx responses are retried until success") {
  std::atomic<int> failures{2};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    if (failures.fetch_sub(1) > 0) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
      return;
    }
    res.set_content(ok_reply("recovered \\boxed{1}", 42).dump(), "application/json");
  });
  HttpBackend backend(test_config(server.url()));
  auto out = backend.sample(request_with_seeds(1));
  CHECK(out[0].token_count == 42);
  CHECK(server.hits == 3);
}

TEST_CASE("persistent failures exhaust retries into a transport error") {
  LocalServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  HttpBackend backend(test_config(server.url()));
  CHECK_THROWS_AS(backend.sample(request_with_seeds(1)), TransportError);
  CHECK(server.hits == 3);  // initial attempt + 2 retries
}

TEST_CASE("non-retryable statuses fail fast as protocol errors") {
  LocalServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  HttpBackend backend(test_config(server.url()));
  CHECK_THROWS_AS(backend.sample(request_with_seeds(1)), ProtocolError);
  CHECK(server.hits == 1);
}

TEST_CASE("garbage payloads surface as protocol errors") {
  LocalServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content("this is not json", "application/json");
  });
  HttpBackend backend(test_config(server.url()));
  CHECK_THROWS_AS(backend.sample(request_with_seeds(1)), ProtocolError);
}

TEST_CASE("logprob sums are picked up when the service sends them") {
  LocalServer server([](const httplib::Request&, httplib::Response& res) {
    json reply = ok_reply("with logprobs", 12);
    reply["choices"][0]["logprobs"] =
        json{{"content", json::array({json{{"logprob", -0.5}}, json{{"logprob", -1.25}}})}};
    res.set_content(reply.dump(), "application/json");
  });
  HttpBackend backend(test_config(server.url()));
  auto out = backend.sample(request_with_seeds(1));
  REQUIRE(out[0].logprob_sum);
  CHECK(*out[0].logprob_sum == doctest::Approx(-1.75));
}

TEST_CASE("an unreachable host is a transport error") {
  HttpBackendConfig cfg = test_config("http://127.0.0.1:1");
  cfg.max_retries = 1;
  HttpBackend backend(cfg);
  CHECK_THROWS_AS(backend.sample(request_with_seeds(1)), TransportError);
}

TEST_CASE("environment configuration requires the url and model") {
  unsetenv("BACKEND_URL");
  unsetenv("BACKEND_MODEL");
  CHECK_THROWS_AS(HttpBackendConfig::from_env(), ConfigError);
  setenv("BACKEND_URL", "http://example.test", 1);
  CHECK_THROWS_AS(HttpBackendConfig::from_env(), ConfigError);
  setenv("BACKEND_MODEL", "m", 1);
  setenv("BACKEND_API_KEY", "k", 1);
  HttpBackendConfig cfg = HttpBackendConfig::from_env();
  CHECK(cfg.base_url == "http://example.test");
  CHECK(cfg.model == "m");
  CHECK(cfg.api_key == "k");
  unsetenv("BACKEND_URL");
  unsetenv("BACKEND_MODEL");
  unsetenv("BACKEND_API_KEY");
}
