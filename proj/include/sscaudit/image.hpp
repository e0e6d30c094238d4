#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ssc {

// 8-bit grayscale raster, row-major. Images travel through the pipeline
// lossless end-to-end; PNG is the only on-disk format.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, std::uint8_t fill)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v) {
    pixels[static_cast<std::size_t>(y) * width + x] = v;
  }
  void fill_rect(int x0, int y0, int w, int h, std::uint8_t v);
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

  bool operator==(const Image&) const = default;
};

Image crop(const Image& img, int x0, int y0, int w, int h);
void blit(Image& dst, const Image& src, int x0, int y0);

// PNG, 8-bit grayscale, non-interlaced. The encoder emits stored (type 0)
// deflate blocks so output bytes are invariant across toolchains; the decoder
// understands the full deflate format and all five scanline filters, so
// externally produced grayscale PNGs load too.
std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(const std::vector<std::uint8_t>& bytes);

void save_png(const std::filesystem::path& path, const Image& img);
Image load_png(const std::filesystem::path& path);

}  // namespace ssc
