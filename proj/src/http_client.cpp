#include "sscaudit/http_client.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sscaudit/cache.hpp"
#include "sscaudit/errors.hpp"
#include "sscaudit/image.hpp"

namespace ssc {

using nlohmann::json;

std::string base64_encode(const std::vector<std::uint8_t>& data) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back(alphabet[v & 63]);
  }
  if (i + 1 == data.size()) {
    std::uint32_t v = data[i] << 16;
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == data.size()) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out += "=";
  }
  return out;
}

std::string canonical_request_body(const HttpModelConfig& config, const PromptBundle& bundle) {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", bundle.text}});
  for (const auto& img : bundle.images) {
    std::string data_url = "data:image/png;base64," + base64_encode(encode_png(*img));
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url}}}});
  }
  json body;
  body["model"] = config.model;
  body["temperature"] = 0;
  body["max_tokens"] = config.max_tokens;
  body["messages"] = json::array({{{"role", "user"}, {"content", content}}});
  return body.dump();
}

namespace {

class HttpClient : public ModelClient {
 public:
  explicit HttpClient(HttpModelConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw InvalidParams("http back-end needs a base url");
    std::size_t scheme = config_.base_url.find("://");
    std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    std::size_t slash = config_.base_url.find('/', host_start);
    if (slash == std::string::npos) {
      origin_ = config_.base_url;
    } else {
      origin_ = config_.base_url.substr(0, slash);
      path_prefix_ = config_.base_url.substr(slash);
      while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
    if (!config_.cache_dir.empty()) cache_ = std::make_unique<ResponseCache>(config_.cache_dir);
  }

  std::string model_id() const override { return "http:" + config_.model; }

  Transcript answer(const PromptBundle& bundle) override {
    std::string body = canonical_request_body(config_, bundle);
    std::string key =
        ResponseCache::make_key(config_.model, condition_name(bundle.condition), body);

    Transcript t;
    t.item_id = bundle.item_id;
    t.condition = bundle.condition;
    t.model_id = model_id();

    if (cache_) {
      if (auto rec = cache_->get(key)) {
        t.raw_text = rec->at("raw_text").get<std::string>();
        t.cache_hit = true;
        t.attempt_count = 0;
        return t;
      }
    }

    int max_attempts = static_cast<int>(config_.backoff_ms.size()) + 1;
    std::string last_error;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(config_.backoff_ms[attempt - 1]));
      }
      auto started = std::chrono::steady_clock::now();
      httplib::Client cli(origin_);
      cli.set_connection_timeout(std::chrono::milliseconds(
          static_cast<int>(config_.timeout_sec * 1000)));
      cli.set_read_timeout(
          std::chrono::milliseconds(static_cast<int>(config_.timeout_sec * 1000)));
      httplib::Headers headers;
      if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);
      auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body,
                          "application/json");
      double elapsed_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started)
                              .count();
      if (!res) {
        bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                         res.error() == httplib::Error::Read;
        last_error = std::string(timed_out ? "timeout" : "transport failure") + " (" +
                     httplib::to_string(res.error()) + ")";
        continue;  // retryable
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "http status " + std::to_string(res->status);
        continue;  // retryable
      }
      if (res->status != 200) {
        throw TransportError("http status " + std::to_string(res->status) + ": " + res->body);
      }
      std::string content;
      try {
        json reply = json::parse(res->body);
        content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        throw MalformedResponse(std::string("response shape: ") + e.what());
      }
      t.raw_text = content;
      t.latency_ms = elapsed_ms;
      t.attempt_count = attempt + 1;
      if (cache_) {
        cache_->put(key, json{{"raw_text", content}, {"model_id", model_id()}});
      }
      return t;
    }
    throw TransportError("exhausted " + std::to_string(max_attempts) + " attempts: " +
                         last_error);
  }

 private:
  HttpModelConfig config_;
  std::string origin_;
  std::string path_prefix_;
  std::unique_ptr<ResponseCache> cache_;
};

}  // namespace

std::unique_ptr<ModelClient> make_http_client(const HttpModelConfig& config) {
  return std::make_unique<HttpClient>(config);
}

}  // namespace ssc
