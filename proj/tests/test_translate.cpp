#include <doctest.h>

#include <set>
#include <string>

#include "sscaudit/errors.hpp"
#include "sscaudit/font5x7.hpp"
#include "sscaudit/rng.hpp"
#include "sscaudit/translate.hpp"

using namespace ssc;

namespace {

std::string random_text(Rng& rng, int max_len) {
  int len = static_cast<int>(rng.uniform_below(max_len + 1));
  std::string s;
  s.reserve(len);
  for (int i = 0; i < len; ++i) {
    if (rng.uniform_below(12) == 0) {
      s.push_back('\n');
    } else {
      s.push_back(static_cast<char>(0x20 + rng.uniform_below(95)));
    }
  }
  return s;
}

Image pad_centered(const Image& inner, int total_width, std::uint8_t bg) {
  Image out(total_width, inner.height, bg);
  blit(out, inner, (total_width - inner.width) / 2, 0);
  return out;
}

}  // namespace

TEST_CASE("font glyphs are pairwise distinct and space is blank") {
  std::set<std::uint64_t> seen;
  auto key = [](const font5x7::Columns& cols) {
    std::uint64_t k = 0;
    for (int i = 0; i < 5; ++i) k = (k << 8) | cols[i];
    return k;
  };
  for (char c = font5x7::kFirstChar;; ++c) {
    CHECK(seen.insert(key(font5x7::glyph(c))).second);
    if (c == font5x7::kLastChar) break;
  }
  CHECK(seen.size() == 95);
  CHECK(seen.insert(key(font5x7::kEndMark)).second);  // end mark collides with nothing
  for (std::uint8_t col : font5x7::glyph(' ')) CHECK(col == 0);
  CHECK(!font5x7::supported('\t'));
  CHECK(!font5x7::supported(static_cast<char>(0x7f)));
  CHECK(font5x7::supported('~'));
}

TEST_CASE("single glyph geometry matches the cell contract") {
  RenderConfig cfg;
  cfg.glyph_scale = 2;
  cfg.wrap_columns = 40;
  cfg.margin_px = 4;
  Image img = render_text_image("A", cfg);
  // cell = (5+1)*scale x (7+1)*scale, margin on all sides
  CHECK(img.width == 2 * 4 + 12);
  CHECK(img.height == 2 * 4 + 16);
  const auto& cols = font5x7::glyph('A');
  for (int col = 0; col < 5; ++col) {
    for (int row = 0; row < 7; ++row) {
      bool on = (cols[col] >> row) & 1;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          CHECK(img.at(4 + col * 2 + dx, 4 + row * 2 + dy) == (on ? 0 : 255));
        }
      }
    }
  }
  CHECK(decode_text_image(img, cfg) == "A");
}

TEST_CASE("empty text renders a margin-only image") {
  RenderConfig cfg;
  Image img = render_text_image("", cfg);
  CHECK(img.width == 2 * cfg.margin_px);
  CHECK(img.height == 2 * cfg.margin_px);
  for (auto p : img.pixels) CHECK(p == cfg.background);
  CHECK(decode_text_image(img, cfg) == "");
}

TEST_CASE("round trip on targeted break-structure edges") {
  RenderConfig cfg;
  cfg.wrap_columns = 8;
  for (const std::string s : {
           "", "\n", "\n\n", "A", "A ", "A  ", " A", " A\n B", "AB\n", "ABCDEFGH",
           "ABCDEFGH\n", "ABCDEFGH\nX", "ABCDEFGHX", "ABCDEF  ", "ABCDEF  \nX",
           "ABCDEFG \nX", "A\n\nB", "  ", "ABCDEFGHIJKLMNOPQR", "trailing \n space ",
           "exact-w8\nexact-w8\n", "a b c d e f g h i j",
       }) {
    CAPTURE(s);
    CHECK(decode_text_image(render_text_image(s, cfg), cfg) == s);
  }
}

TEST_CASE("round trip property over seeded random strings") {
  RenderConfig cfg;  // defaults: scale 2, wrap 48, margin 8
  Rng rng(20240808);
  for (int i = 0; i < 1000; ++i) {
    std::string s = random_text(rng, 200);
    CAPTURE(i);
    CHECK(decode_text_image(render_text_image(s, cfg), cfg) == s);
  }
}

TEST_CASE("round trip at other configs") {
  RenderConfig cfg;
  cfg.glyph_scale = 1;
  cfg.wrap_columns = 11;
  cfg.margin_px = 0;
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    std::string s = random_text(rng, 60);
    CHECK(decode_text_image(render_text_image(s, cfg), cfg) == s);
  }
}

TEST_CASE("exhaustive glyph-table round trip") {
  std::string all;
  for (char c = font5x7::kFirstChar;; ++c) {
    all.push_back(c);
    if (c == font5x7::kLastChar) break;
  }
  REQUIRE(all.size() == 95);
  RenderConfig cfg;
  CHECK(decode_text_image(render_text_image(all, cfg), cfg) == all);
}

TEST_CASE("unsupported characters are rejected, never substituted") {
  RenderConfig cfg;
  CHECK_THROWS_AS(render_text_image("a\tb", cfg), UnsupportedCharacter);
  CHECK_THROWS_AS(render_text_image(std::string(1, '\x01'), cfg), UnsupportedCharacter);
  CHECK_THROWS_AS(render_text_image("caf\xc3\xa9", cfg), UnsupportedCharacter);
}

TEST_CASE("one flipped pixel inside a glyph cell fails decoding") {
  RenderConfig cfg;
  Image img = render_text_image("HELLO 42", cfg);
  Image tampered = img;
  // inside the first glyph cell
  int x = cfg.margin_px + 1, y = cfg.margin_px + 1;
  tampered.set(x, y, tampered.at(x, y) == 0 ? 255 : 0);
  CHECK_THROWS_AS(decode_text_image(tampered, cfg), UnrecognizedGlyph);
}

TEST_CASE("decoding with a mismatched config fails") {
  RenderConfig cfg;
  Image img = render_text_image("MISMATCH", cfg);
  RenderConfig other = cfg;
  other.glyph_scale = 3;
  CHECK_THROWS_AS(decode_text_image(img, other), UnrecognizedGlyph);
}

TEST_CASE("rendering is injective on sampled distinct strings") {
  RenderConfig cfg;
  Rng rng(5150);
  for (int i = 0; i < 100; ++i) {
    std::string a = random_text(rng, 40);
    std::string b = random_text(rng, 40);
    if (a == b) continue;
    CHECK(render_text_image(a, cfg) != render_text_image(b, cfg));
  }
}

TEST_CASE("decode_centered recovers text from padded panes") {
  RenderConfig cfg;
  cfg.wrap_columns = 8;
  for (const std::string s : {"A", " A\n B", "ABCDEF  \nX", "Which?", "a=17, b=25",
                              "exact-w8\nY", "pad  me "}) {
    Image inner = render_text_image(s, cfg);
    for (int extra : {0, 2, 12, 13, 60}) {
      Image pane = pad_centered(inner, inner.width + extra, cfg.background);
      CAPTURE(s);
      CAPTURE(extra);
      CHECK(decode_centered_text_image(pane, cfg) == s);
    }
  }
}

TEST_CASE("decode_centered rejects ink in the padding") {
  RenderConfig cfg;
  Image inner = render_text_image("HELLO", cfg);
  Image pane = pad_centered(inner, inner.width + 24, cfg.background);
  pane.set(1, 1, 0);
  CHECK_THROWS_AS(decode_centered_text_image(pane, cfg), UnrecognizedGlyph);
}

TEST_CASE("compose_symv stacks panes with a separator") {
  RenderConfig cfg;
  Image v(100, 80, 17);
  Image t_img(60, 40, 255);
  t_img.set(0, 0, 0);
  Image composite = compose_symv(v, t_img, cfg);
  CHECK(composite.width == 100);
  CHECK(composite.height == 40 + kSeparatorHeight + 80);
  // question pane centered: (100-60)/2 = 20
  CHECK(composite.at(20, 0) == 0);
  for (int x = 0; x < 100; ++x) {
    CHECK(composite.at(x, 40) == kSeparatorGray);
    CHECK(composite.at(x, 47) == kSeparatorGray);
  }
  // bottom pane equals v exactly (no padding needed at equal width)
  CHECK(crop(composite, 0, 48, 100, 80) == v);
}

TEST_CASE("compose_symv pads a narrow scene with background") {
  RenderConfig cfg;
  Image v(30, 10, 9);
  Image t_img(50, 16, 255);
  Image composite = compose_symv(v, t_img, cfg);
  CHECK(composite.width == 50);
  CHECK(crop(composite, 10, 16 + kSeparatorHeight, 30, 10) == v);
  CHECK(composite.at(0, 16 + kSeparatorHeight) == cfg.background);
  CHECK(composite.at(49, 16 + kSeparatorHeight) == cfg.background);
}

TEST_CASE("translate_item fills both derived images and is idempotent") {
  RenderConfig cfg;
  EvaluationItem item;
  item.id = "x1";
  item.t = "What is shown?";
  item.v_label = "nothing";
  item.v = std::make_shared<const Image>(Image(40, 30, 200));

  EvaluationItem once = translate_item(item, cfg);
  REQUIRE(once.translated());
  CHECK(*once.t_img == render_text_image(item.t, cfg));
  EvaluationItem twice = translate_item(once, cfg);
  CHECK(*twice.t_img == *once.t_img);
  CHECK(*twice.symv_composite == *once.symv_composite);

  EvaluationItem bad = item;
  bad.t = "tab\there";
  CHECK_THROWS_AS(translate_item(bad, cfg), UnsupportedCharacter);

  EvaluationItem no_image = item;
  no_image.v = nullptr;
  CHECK_THROWS_AS(translate_item(no_image, cfg), MissingImage);
}

TEST_CASE("render config validation") {
  RenderConfig bad;
  bad.glyph_scale = 0;
  CHECK_THROWS_AS(validate_config(bad), InvalidParams);
  bad = RenderConfig{};
  bad.wrap_columns = 7;
  CHECK_THROWS_AS(validate_config(bad), InvalidParams);
  bad = RenderConfig{};
  bad.foreground = bad.background;
  CHECK_THROWS_AS(validate_config(bad), InvalidParams);
}
