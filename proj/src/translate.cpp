#include "sscaudit/translate.hpp"

#include <unordered_map>

#include "sscaudit/errors.hpp"
#include "sscaudit/font5x7.hpp"

namespace ssc {

namespace {

namespace f = font5x7;

constexpr int kEndMarkId = 256;  // sits outside the char range in the reverse map

std::uint64_t pattern_key(const f::Columns& cols) {
  std::uint64_t key = 0;
  for (int col = 0; col < f::kGlyphWidth; ++col) {
    for (int row = 0; row < f::kGlyphHeight; ++row) {
      if (cols[col] & (1u << row)) key |= 1ull << (col * f::kGlyphHeight + row);
    }
  }
  return key;
}

const std::unordered_map<std::uint64_t, int>& reverse_table() {
  static const auto table = [] {
    std::unordered_map<std::uint64_t, int> t;
    for (int c = f::kFirstChar; c <= f::kLastChar; ++c) {
      t.emplace(pattern_key(f::glyph(static_cast<char>(c))), c);
    }
    t.emplace(pattern_key(f::kEndMark), kEndMarkId);
    return t;
  }();
  return table;
}

struct Row {
  std::string chunk;
  bool final_of_line = false;  // last chunk of its logical line
};

// Hard wrap. A logical line whose length is a positive multiple of
// wrap_columns gets a trailing empty chunk, so a full row always means
// "continues on the next row" and never "line ended here".
std::vector<Row> layout_rows(const std::string& text, int wrap) {
  std::vector<Row> rows;
  if (text.empty()) return rows;
  std::size_t line_start = 0;
  for (;;) {
    std::size_t nl = text.find('\n', line_start);
    std::string line = text.substr(
        line_start, nl == std::string::npos ? std::string::npos : nl - line_start);
    std::size_t pos = 0;
    while (line.size() - pos > static_cast<std::size_t>(wrap)) {
      rows.push_back({line.substr(pos, wrap), false});
      pos += wrap;
    }
    std::size_t rem = line.size() - pos;
    if (rem == static_cast<std::size_t>(wrap)) {
      rows.push_back({line.substr(pos, wrap), false});
      rows.push_back({"", true});
    } else {
      rows.push_back({line.substr(pos), true});
    }
    if (nl == std::string::npos) break;
    line_start = nl + 1;
  }
  return rows;
}

// The end-of-line mark is required on every line-final row except the very
// last row of the image, which is unambiguous unless its chunk ends in a
// space (trailing spaces must survive the round trip).
bool needs_end_mark(const std::vector<Row>& rows, std::size_t i) {
  if (!rows[i].final_of_line) return false;
  if (i + 1 < rows.size()) return true;
  return !rows[i].chunk.empty() && rows[i].chunk.back() == ' ';
}

// Reads one glyph cell back into font bits. Every pixel must reproduce the
// renderer's output exactly; anything else is corruption or a config
// mismatch.
int decode_cell(const Image& img, int x0, int y0, const RenderConfig& cfg) {
  int s = cfg.glyph_scale;
  std::uint64_t key = 0;
  for (int col = 0; col < f::kGlyphWidth; ++col) {
    for (int row = 0; row < f::kGlyphHeight; ++row) {
      std::uint8_t v = img.at(x0 + col * s, y0 + row * s);
      if (v != cfg.foreground && v != cfg.background)
        throw UnrecognizedGlyph("foreign gray level inside glyph cell");
      for (int dy = 0; dy < s; ++dy) {
        for (int dx = 0; dx < s; ++dx) {
          if (img.at(x0 + col * s + dx, y0 + row * s + dy) != v)
            throw UnrecognizedGlyph("non-uniform glyph block");
        }
      }
      if (v == cfg.foreground) key |= 1ull << (col * f::kGlyphHeight + row);
    }
  }
  // gap strip right of the glyph and below it must stay background
  for (int y = y0; y < y0 + cfg.cell_height(); ++y) {
    for (int x = x0 + f::kGlyphWidth * s; x < x0 + cfg.cell_width(); ++x) {
      if (img.at(x, y) != cfg.background) throw UnrecognizedGlyph("ink in inter-glyph gap");
    }
  }
  for (int y = y0 + f::kGlyphHeight * s; y < y0 + cfg.cell_height(); ++y) {
    for (int x = x0; x < x0 + cfg.cell_width(); ++x) {
      if (img.at(x, y) != cfg.background) throw UnrecognizedGlyph("ink in inter-glyph gap");
    }
  }
  auto it = reverse_table().find(key);
  if (it == reverse_table().end()) throw UnrecognizedGlyph("cell matches no font entry");
  return it->second;
}

}  // namespace

void validate_config(const RenderConfig& cfg) {
  if (cfg.glyph_scale < 1) throw InvalidParams("glyph_scale must be >= 1");
  if (cfg.wrap_columns < 8) throw InvalidParams("wrap_columns must be >= 8");
  if (cfg.margin_px < 0) throw InvalidParams("margin_px must be >= 0");
  if (cfg.foreground == cfg.background)
    throw InvalidParams("foreground and background must differ");
}

Image render_text_image(const std::string& text, const RenderConfig& cfg) {
  validate_config(cfg);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '\n' && !f::supported(c)) {
      throw UnsupportedCharacter("unsupported code point " +
                                 std::to_string(static_cast<unsigned char>(c)) + " at offset " +
                                 std::to_string(i));
    }
  }

  auto rows = layout_rows(text, cfg.wrap_columns);
  int width_cells = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int cells = static_cast<int>(rows[i].chunk.size()) + (needs_end_mark(rows, i) ? 1 : 0);
    width_cells = std::max(width_cells, cells);
  }

  int cw = cfg.cell_width(), ch = cfg.cell_height(), m = cfg.margin_px;
  Image img(2 * m + width_cells * cw, 2 * m + static_cast<int>(rows.size()) * ch,
            cfg.background);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string& chunk = rows[i].chunk;
    int y = m + static_cast<int>(i) * ch;
    for (std::size_t j = 0; j < chunk.size(); ++j) {
      f::draw_glyph(img, f::glyph(chunk[j]), m + static_cast<int>(j) * cw, y, cfg.glyph_scale,
                    cfg.foreground);
    }
    if (needs_end_mark(rows, i)) {
      f::draw_glyph(img, f::kEndMark, m + static_cast<int>(chunk.size()) * cw, y,
                    cfg.glyph_scale, cfg.foreground);
    }
  }
  return img;
}

std::string decode_text_image(const Image& img, const RenderConfig& cfg) {
  validate_config(cfg);
  int cw = cfg.cell_width(), ch = cfg.cell_height(), m = cfg.margin_px;
  if (img.width == 2 * m && img.height == 2 * m) {
    for (std::uint8_t p : img.pixels) {
      if (p != cfg.background) throw UnrecognizedGlyph("ink in empty image");
    }
    return "";
  }
  int gw = img.width - 2 * m, gh = img.height - 2 * m;
  if (gw <= 0 || gh <= 0 || gw % cw != 0 || gh % ch != 0)
    throw UnrecognizedGlyph("image geometry does not match config");
  int cols = gw / cw, rows = gh / ch;

  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      bool in_grid = x >= m && x < m + cols * cw && y >= m && y < m + rows * ch;
      if (!in_grid && img.at(x, y) != cfg.background)
        throw UnrecognizedGlyph("ink in margin");
    }
  }

  std::string out;
  for (int r = 0; r < rows; ++r) {
    std::vector<int> cells(cols);
    for (int c = 0; c < cols; ++c) cells[c] = decode_cell(img, m + c * cw, m + r * ch, cfg);

    int mark = -1;
    for (int c = 0; c < cols; ++c) {
      if (cells[c] == kEndMarkId) {
        mark = c;
        break;
      }
    }
    bool last_row = r == rows - 1;
    std::string row_text;
    if (mark >= 0) {
      for (int c = mark + 1; c < cols; ++c) {
        if (cells[c] != ' ') throw UnrecognizedGlyph("ink after end-of-line mark");
      }
      for (int c = 0; c < mark; ++c) row_text.push_back(static_cast<char>(cells[c]));
      out += row_text;
      out.push_back('\n');
    } else if (last_row) {
      int extent = 0;
      for (int c = 0; c < cols; ++c) {
        if (cells[c] != ' ') extent = c + 1;
      }
      for (int c = 0; c < extent; ++c) row_text.push_back(static_cast<char>(cells[c]));
      out += row_text;
      out.push_back('\n');
    } else {
      // full-width continuation row
      if (cols != cfg.wrap_columns)
        throw UnrecognizedGlyph("unterminated row narrower than wrap width");
      for (int c = 0; c < cols; ++c) row_text.push_back(static_cast<char>(cells[c]));
      out += row_text;
    }
  }
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string decode_centered_text_image(const Image& img, const RenderConfig& cfg) {
  validate_config(cfg);
  int cw = cfg.cell_width(), m = cfg.margin_px;
  if (img.width < 2 * m) throw UnrecognizedGlyph("pane narrower than margins");
  for (int k = (img.width - 2 * m) / cw; k >= 0; --k) {
    int w = 2 * m + k * cw;
    int pad = (img.width - w) / 2;
    Image window = crop(img, pad, 0, w, img.height);
    std::string text;
    try {
      text = decode_text_image(window, cfg);
    } catch (const UnrecognizedGlyph&) {
      continue;
    }
    bool outside_clear = true;
    for (int y = 0; y < img.height && outside_clear; ++y) {
      for (int x = 0; x < img.width; ++x) {
        if (x >= pad && x < pad + w) continue;
        if (img.at(x, y) != cfg.background) {
          outside_clear = false;
          break;
        }
      }
    }
    if (!outside_clear) continue;
    if (render_text_image(text, cfg) == window) return text;
  }
  throw UnrecognizedGlyph("no centered text window decodes cleanly");
}

Image compose_symv(const Image& v, const Image& t_img, const RenderConfig& cfg) {
  int width = std::max(v.width, t_img.width);
  Image out(width, t_img.height + kSeparatorHeight + v.height, cfg.background);
  blit(out, t_img, (width - t_img.width) / 2, 0);
  out.fill_rect(0, t_img.height, width, kSeparatorHeight, kSeparatorGray);
  blit(out, v, (width - v.width) / 2, t_img.height + kSeparatorHeight);
  return out;
}

EvaluationItem translate_item(const EvaluationItem& item, const RenderConfig& cfg) {
  if (!item.v) throw MissingImage("item " + item.id + " has no scene image to compose");
  EvaluationItem out = item;
  Image t_img = render_text_image(item.t, cfg);
  Image composite = compose_symv(*item.v, t_img, cfg);
  out.t_img = std::make_shared<const Image>(std::move(t_img));
  out.symv_composite = std::make_shared<const Image>(std::move(composite));
  return out;
}

}  // namespace ssc
