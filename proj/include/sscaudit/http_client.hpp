#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sscaudit/model_client.hpp"

namespace ssc {

// Remote chat-completions back-end.
//
//   POST {base_url}/chat/completions
//   body: { model, temperature: 0, max_tokens,
//           messages: [{ role: "user", content: [
//             { type: "text", text: ... },
//             { type: "image_url", image_url: { url: "data:image/png;base64,..." } }... ]}] }
//
// The first choice's message content is the transcript text. Transport
// failures, timeouts and 429s retry with the configured backoff and then
// throw; a structurally wrong 200 throws MalformedResponse without retrying.
struct HttpModelConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8831/v1
  std::string model;
  std::string api_key;  // resolved from SSC_AUDIT_API_KEY by the CLI
  int max_tokens = 64;
  double timeout_sec = 60.0;
  std::vector<int> backoff_ms = {1000, 2000, 4000};
  std::string cache_dir;  // empty disables the response cache
};

std::unique_ptr<ModelClient> make_http_client(const HttpModelConfig& config);

std::string base64_encode(const std::vector<std::uint8_t>& data);

// request body exactly as sent; also the cache-key material
std::string canonical_request_body(const HttpModelConfig& config, const PromptBundle& bundle);

}  // namespace ssc
