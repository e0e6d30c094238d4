#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace ssc {

// Content-addressed response store: one JSON file per key under the cache
// directory, written via temp-file + rename so a concurrent reader never
// observes a partial record. Keys are SHA-256 hex over
// (model_id \n condition \n canonical request bytes).
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string make_key(const std::string& model_id, const std::string& condition,
                              const std::string& canonical_request);

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& record) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace ssc
