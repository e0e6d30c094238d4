#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ssc {

class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  void update(std::string_view s) { update(s.data(), s.size()); }
  void update(const std::vector<std::uint8_t>& v) { update(v.data(), v.size()); }
  std::string hex_digest();  // finalizes; do not update afterwards

 private:
  void process_block(const std::uint8_t* block);

  std::uint32_t h_[8];
  std::uint8_t buffer_[64];
  std::size_t buffer_len_ = 0;
  std::uint64_t total_len_ = 0;
};

std::string sha256_hex(std::string_view data);

}  // namespace ssc
