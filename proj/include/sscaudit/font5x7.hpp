#pragma once

#include <array>
#include <cstdint>

#include "sscaudit/image.hpp"

namespace ssc {
namespace font5x7 {

// Built-in fixed 5x7 monospace bitmap font covering the printable 7-bit
// range (0x20..0x7E). Glyphs are stored column-major, five bytes per glyph,
// bit 0 = top row. Using a compiled-in table instead of a system font keeps
// rendering byte-exact across platforms and makes the decoder provable.

constexpr int kGlyphWidth = 5;
constexpr int kGlyphHeight = 7;
constexpr char kFirstChar = 0x20;
constexpr char kLastChar = 0x7e;
constexpr int kGlyphCount = kLastChar - kFirstChar + 1;  // 95

using Columns = std::array<std::uint8_t, kGlyphWidth>;

// Reserved end-of-line mark (a solid 5x7 block). It is drawn by the text
// renderer where a line break would otherwise be ambiguous and is never a
// member of the character set.
constexpr Columns kEndMark = {0x7f, 0x7f, 0x7f, 0x7f, 0x7f};

bool supported(char c);
const Columns& glyph(char c);  // c must be supported

// Scaled blit: each font pixel becomes a scale x scale block of `fg`.
// Background pixels are left untouched.
void draw_glyph(Image& img, const Columns& cols, int x, int y, int scale, std::uint8_t fg);

}  // namespace font5x7
}  // namespace ssc
