#pragma once

#include <string>

#include "rtrim/backend.hpp"

namespace rtrim {

struct HttpBackendConfig {
  std::string base_url;  // scheme://host[:port]
  std::string api_key;
  std::string model;
  std::string endpoint_path = "/v1/chat/completions";
  int max_retries = 4;           // retransmissions after the first attempt
  int initial_backoff_ms = 250;
  int max_backoff_ms = 4000;
  double backoff_multiplier = 2.0;
  int timeout_seconds = 300;
  int max_in_flight = 4;

  // Reads BACKEND_URL, BACKEND_API_KEY and BACKEND_MODEL.
  static HttpBackendConfig from_env();
};

// Chat-completions client. Sends one request per seed, retries transient
// transport failures and 429/5xx with capped exponential backoff, and takes
// token counts from the service usage report; a missing report is a
// ProtocolError, never a silent fallback.
class HttpBackend : public SamplingBackend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);

  std::vector<Completion> sample(const PromptRequest& request) override;
  std::string describe() const override;

 private:
  Completion request_one(const PromptRequest& request, std::uint64_t seed) const;

  HttpBackendConfig cfg_;
};

}  // namespace rtrim
