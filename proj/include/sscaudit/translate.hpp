#pragma once

#include <cstdint>
#include <string>

#include "sscaudit/image.hpp"
#include "sscaudit/item.hpp"

namespace ssc {

struct RenderConfig {
  int glyph_scale = 2;    // pixels per font pixel
  int wrap_columns = 48;  // hard wrap width in characters
  int margin_px = 8;      // border on all four sides
  std::uint8_t foreground = 0;
  std::uint8_t background = 255;

  int cell_width() const { return (5 + 1) * glyph_scale; }   // glyph + 1 gap column
  int cell_height() const { return (7 + 1) * glyph_scale; }  // glyph + 1 gap row
};

void validate_config(const RenderConfig& cfg);  // throws InvalidParams

// Deterministic rasterization of text (printable ASCII plus newline) on a
// fixed glyph grid. Lines are hard-wrapped at wrap_columns; a reserved
// end-of-line mark is drawn wherever the break structure would otherwise be
// ambiguous, so decode_text_image is an exact inverse:
//
//   decode_text_image(render_text_image(s, cfg), cfg) == s
//
// for every supported string s. Unsupported characters raise
// UnsupportedCharacter; callers must regenerate the item, never substitute.
Image render_text_image(const std::string& text, const RenderConfig& cfg);

// Exact inverse of render_text_image under the same config. Any pixel that
// does not reproduce a glyph cell bit-for-bit raises UnrecognizedGlyph.
std::string decode_text_image(const Image& img, const RenderConfig& cfg);

// Decodes a render_text_image output that sits horizontally centered inside
// a wider background field (the pane layout compose_symv produces). The
// accepted window is re-rendered and compared against the source pixels, so
// a successful decode is certified exact.
std::string decode_centered_text_image(const Image& img, const RenderConfig& cfg);

// gray level reserved for the composite separator band; generators and the
// renderer never emit it
inline constexpr std::uint8_t kSeparatorGray = 128;
inline constexpr int kSeparatorHeight = 8;

// Vertical stack: t_img on top, separator band, v below; both panes padded
// symmetrically with background to the wider of the two. v's pixels are
// carried over untouched.
Image compose_symv(const Image& v, const Image& t_img, const RenderConfig& cfg);

// Fills t_img = render(t) and symv_composite = compose(v, t_img).
// Idempotent: translating an already-translated item yields identical bytes.
EvaluationItem translate_item(const EvaluationItem& item, const RenderConfig& cfg);

}  // namespace ssc
