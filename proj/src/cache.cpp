#include "sscaudit/cache.hpp"

#include <fstream>

#include "sscaudit/errors.hpp"
#include "sscaudit/sha256.hpp"

namespace ssc {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

std::string ResponseCache::make_key(const std::string& model_id, const std::string& condition,
                                    const std::string& canonical_request) {
  Sha256 h;
  h.update(model_id);
  h.update("\n");
  h.update(condition);
  h.update("\n");
  h.update(canonical_request);
  return h.hex_digest();
}

std::optional<nlohmann::json> ResponseCache::get(const std::string& key) const {
  fs::path p = dir_ / (key + ".json");
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // treat a torn record as a miss
  }
}

void ResponseCache::put(const std::string& key, const nlohmann::json& record) const {
  fs::path final_path = dir_ / (key + ".json");
  fs::path tmp_path = dir_ / (key + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry: " + tmp_path.string());
    out << record.dump();
  }
  fs::rename(tmp_path, final_path);
}

}  // namespace ssc
