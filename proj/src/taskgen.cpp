#include "sscaudit/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sscaudit/errors.hpp"
#include "sscaudit/font5x7.hpp"
#include "sscaudit/rng.hpp"

namespace ssc {

namespace g = chartgeom;

namespace {

constexpr int kMaxResamples = 1000;

int param_int(const GeneratorSpec& spec, const std::string& name, int fallback) {
  auto it = spec.params.find(name);
  if (it == spec.params.end()) return fallback;
  return static_cast<int>(std::llround(it->second));
}

bool has_param(const GeneratorSpec& spec, const std::string& name) {
  return spec.params.count(name) > 0;
}

std::string item_id(const GeneratorSpec& spec, int index) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s-s%llu-%05d", spec.task_kind.c_str(),
                static_cast<unsigned long long>(spec.seed), index);
  return buf;
}

int count_nonspace(const std::string& s) {
  int n = 0;
  for (char c : s) {
    if (c != ' ') ++n;
  }
  return n;
}

// ---- candlestick ----

int candle_y(int price) { return g::kCandleTopMargin + (g::kPriceMax - price) * g::kPricePpu; }

Image render_candlestick(const std::vector<Ohlc>& series) {
  int k = static_cast<int>(series.size());
  int pitch = g::kCandleWidth + g::kCandleGap;
  int width = 2 * g::kCandleSideMargin + k * pitch - g::kCandleGap;
  int y_base = candle_y(0);
  Image img(width, y_base + 1 + g::kCandleBottomMargin, g::kBackground);
  img.fill_rect(0, y_base, width, 1, g::kInk);
  for (int i = 0; i < k; ++i) {
    const Ohlc& c = series[i];
    int x = g::kCandleSideMargin + i * pitch;
    int wick_x = x + g::kCandleWidth / 2;
    img.fill_rect(wick_x, candle_y(c.high), 1, (c.high - c.low) * g::kPricePpu + 1, g::kInk);
    int body_top = std::max(c.open, c.close);
    int body_bottom = std::min(c.open, c.close);
    std::uint8_t fill = c.close >= c.open ? g::kUpFill : g::kDownFill;
    img.fill_rect(x, candle_y(body_top), g::kCandleWidth,
                  (body_top - body_bottom) * g::kPricePpu + 1, fill);
  }
  return img;
}

std::string candlestick_label(const std::vector<Ohlc>& series) {
  std::string out = "idx,open,high,low,close";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += "\n" + std::to_string(i) + "," + std::to_string(series[i].open) + "," +
           std::to_string(series[i].high) + "," + std::to_string(series[i].low) + "," +
           std::to_string(series[i].close);
  }
  return out;
}

std::string candlestick_answer(const std::vector<Ohlc>& series) {
  int max_high = 0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) max_high = std::max(max_high, series[i].high);
  return series.back().close > max_high ? "yes" : "no";
}

int candlestick_margin(const std::vector<Ohlc>& series) {
  int max_high = 0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) max_high = std::max(max_high, series[i].high);
  return std::abs(series.back().close - max_high);
}

// ---- barmax ----

Image render_bar_chart(const std::vector<int>& heights) {
  int m = static_cast<int>(heights.size());
  int pitch = g::kBarWidth + g::kBarGap;
  int width = 2 * g::kBarSideMargin + m * pitch - g::kBarGap;
  int y_base = g::kBarTopMargin + g::kBarHeightCeiling * g::kBarUnit;
  int label_h = 8 * g::kLabelScale;
  Image img(width, y_base + 1 + g::kLabelPad + label_h + g::kBarBottomMargin, g::kBackground);
  img.fill_rect(0, y_base, width, 1, g::kInk);
  for (int i = 0; i < m; ++i) {
    int x = g::kBarSideMargin + i * pitch;
    img.fill_rect(x, y_base - heights[i] * g::kBarUnit, g::kBarWidth,
                  heights[i] * g::kBarUnit, g::kInk);
    int label_x = x + (g::kBarWidth - 5 * g::kLabelScale) / 2;
    font5x7::draw_glyph(img, font5x7::glyph(static_cast<char>('A' + i)), label_x,
                        y_base + 1 + g::kLabelPad, g::kLabelScale, g::kInk);
  }
  return img;
}

std::string barmax_label(const std::vector<int>& heights) {
  std::string out = "heights:";
  for (std::size_t i = 0; i < heights.size(); ++i) {
    out += std::string(i == 0 ? " " : ", ") + static_cast<char>('A' + i) + "=" +
           std::to_string(heights[i]);
  }
  return out;
}

// ---- shared plumbing ----

struct PaneSplit {
  Image top;
  Image bottom;
};

PaneSplit split_composite(const Image& img) {
  auto all_separator = [&](int y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y) != kSeparatorGray) return false;
    }
    return true;
  };
  for (int y = 0; y < img.height; ++y) {
    if (all_separator(y)) {
      if (y + kSeparatorHeight > img.height)
        throw UnrecognizedGlyph("separator band truncated");
      for (int i = 1; i < kSeparatorHeight; ++i) {
        if (!all_separator(y + i)) throw UnrecognizedGlyph("separator band malformed");
      }
      return {crop(img, 0, 0, img.width, y),
              crop(img, 0, y + kSeparatorHeight, img.width,
                   img.height - y - kSeparatorHeight)};
    }
  }
  throw UnrecognizedGlyph("image is not a symv composite");
}

// baseline = the row holding the longest horizontal ink run; returns
// (row, run_start, run_length)
struct Baseline {
  int row = -1, x0 = 0, length = 0;
};

Baseline find_baseline(const Image& img) {
  Baseline best;
  for (int y = 0; y < img.height; ++y) {
    int run = 0, start = 0;
    for (int x = 0; x <= img.width; ++x) {
      if (x < img.width && img.at(x, y) == g::kInk) {
        if (run == 0) start = x;
        ++run;
      } else {
        if (run > best.length) best = {y, start, run};
        run = 0;
      }
    }
  }
  if (best.row < 0) throw Error("no ink in chart pane");
  return best;
}

int price_from_row(int y_base, int row, int per_unit, const char* what) {
  int dy = y_base - row;
  if (dy < 0 || dy % per_unit != 0)
    throw Error(std::string("chart row does not sit on the ") + what + " grid");
  return dy / per_unit;
}

std::string expected_question(const std::string& task_kind) {
  if (task_kind == "candlestick") return kCandlestickQuestion;
  if (task_kind == "barmax") return kBarmaxQuestion;
  if (task_kind == "textarith") return kTextarithQuestion;
  throw UnknownTaskKind("no generator named " + task_kind);
}

std::string solve_candlestick(const std::vector<Ohlc>& series) {
  if (series.size() < 2) throw Error("candlestick series too short");
  return candlestick_answer(series);
}

std::string solve_barmax(const std::vector<int>& heights) {
  auto it = std::max_element(heights.begin(), heights.end());
  return std::string(1, static_cast<char>('A' + (it - heights.begin())));
}

std::string solve_textarith(const std::string& scene) {
  int a = 0, b = 0;
  if (std::sscanf(scene.c_str(), "a=%d, b=%d", &a, &b) != 2)
    throw Error("textarith scene does not parse: " + scene);
  return std::to_string(a + b);
}

std::vector<Ohlc> parse_candlestick_label(const std::string& label) {
  std::vector<Ohlc> out;
  std::size_t pos = 0;
  bool header = true;
  while (pos <= label.size()) {
    std::size_t nl = label.find('\n', pos);
    std::string line = label.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (header) {
      if (line != "idx,open,high,low,close") throw Error("bad candlestick table header");
      header = false;
    } else if (!line.empty()) {
      int idx, o, h, l, c;
      if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%d", &idx, &o, &h, &l, &c) != 5)
        throw Error("bad candlestick table row: " + line);
      out.push_back({o, h, l, c});
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::vector<int> parse_barmax_label(const std::string& label) {
  const std::string prefix = "heights: ";
  if (label.rfind(prefix, 0) != 0) throw Error("bad barmax label: " + label);
  std::vector<int> heights;
  std::size_t pos = prefix.size();
  while (pos < label.size()) {
    std::size_t end = label.find(", ", pos);
    std::string tok =
        label.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    char letter;
    int h;
    if (std::sscanf(tok.c_str(), "%c=%d", &letter, &h) != 2 ||
        letter != static_cast<char>('A' + heights.size()))
      throw Error("bad barmax entry: " + tok);
    heights.push_back(h);
    if (end == std::string::npos) break;
    pos = end + 2;
  }
  return heights;
}

std::string solve_from_pixels(const std::string& task_kind, const Image& pane,
                              const RenderConfig&) {
  if (task_kind == "candlestick") return solve_candlestick(read_candlestick_chart(pane));
  if (task_kind == "barmax") return solve_barmax(read_bar_chart(pane));
  // textarith scenes are rendered with the default config at generation time
  return solve_textarith(decode_centered_text_image(pane, RenderConfig{}));
}

std::string solve_from_label(const std::string& task_kind, const std::string& facts) {
  if (task_kind == "candlestick") return solve_candlestick(parse_candlestick_label(facts));
  if (task_kind == "barmax") return solve_barmax(parse_barmax_label(facts));
  return solve_textarith(facts);
}

}  // namespace

std::vector<Ohlc> read_candlestick_chart(const Image& img) {
  Baseline base = find_baseline(img);
  int pitch = g::kCandleWidth + g::kCandleGap;
  int inner = base.length - 2 * g::kCandleSideMargin + g::kCandleGap;
  if (inner <= 0 || inner % pitch != 0) throw Error("candlestick chart width mismatch");
  int k = inner / pitch;

  std::vector<Ohlc> out;
  for (int i = 0; i < k; ++i) {
    int x = base.x0 + g::kCandleSideMargin + i * pitch;
    int top = -1, bottom = -1;
    for (int y = 0; y < base.row; ++y) {
      bool ink = false;
      for (int dx = 0; dx < g::kCandleWidth; ++dx) {
        if (img.at(x + dx, y) != g::kBackground) {
          ink = true;
          break;
        }
      }
      if (ink) {
        if (top < 0) top = y;
        bottom = y;
      }
    }
    if (top < 0) throw Error("candle " + std::to_string(i) + " has no pixels");
    Ohlc c;
    c.high = price_from_row(base.row, top, g::kPricePpu, "price");
    c.low = price_from_row(base.row, bottom, g::kPricePpu, "price");

    int body_top = -1, body_bottom = -1;
    std::uint8_t fill = 0;
    for (int y = top; y <= bottom; ++y) {
      std::uint8_t v = img.at(x, y);  // leftmost body column, never wick
      if (v == g::kUpFill || v == g::kDownFill) {
        if (body_top < 0) {
          body_top = y;
          fill = v;
        }
        body_bottom = y;
      }
    }
    if (body_top < 0) throw Error("candle " + std::to_string(i) + " has no body");
    int p_top = price_from_row(base.row, body_top, g::kPricePpu, "price");
    int p_bottom = price_from_row(base.row, body_bottom, g::kPricePpu, "price");
    if (fill == g::kUpFill) {
      c.close = p_top;
      c.open = p_bottom;
    } else {
      c.open = p_top;
      c.close = p_bottom;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<int> read_bar_chart(const Image& img) {
  Baseline base = find_baseline(img);
  int pitch = g::kBarWidth + g::kBarGap;
  int inner = base.length - 2 * g::kBarSideMargin + g::kBarGap;
  if (inner <= 0 || inner % pitch != 0) throw Error("bar chart width mismatch");
  int m = inner / pitch;

  std::vector<int> heights;
  for (int i = 0; i < m; ++i) {
    int x = base.x0 + g::kBarSideMargin + i * pitch;
    int top = -1;
    for (int y = 0; y < base.row && top < 0; ++y) {
      for (int dx = 0; dx < g::kBarWidth; ++dx) {
        if (img.at(x + dx, y) == g::kInk) {
          top = y;
          break;
        }
      }
    }
    if (top < 0) throw Error("bar " + std::to_string(i) + " has no pixels");
    heights.push_back(price_from_row(base.row, top, g::kBarUnit, "bar-height"));
  }
  return heights;
}

std::vector<EvaluationItem> gen_candlestick(const GeneratorSpec& spec) {
  int k = param_int(spec, "candles", 8);
  int step_max = param_int(spec, "step_max", 3);
  int wick_max = param_int(spec, "wick_max", 3);
  if (k < 3) throw InvalidParams("candlestick needs at least 3 candles");
  if (step_max < 0 || wick_max < 0) throw InvalidParams("step_max/wick_max must be >= 0");

  Rng rng(spec.seed);
  std::vector<EvaluationItem> items;
  for (int i = 0; i < spec.n; ++i) {
    std::vector<Ohlc> series;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt >= kMaxResamples)
        throw Exhausted("candlestick margin unreachable with given params");
      series.clear();
      int price = static_cast<int>(rng.uniform_int(40, 60));
      for (int c = 0; c < k; ++c) {
        Ohlc candle;
        candle.open = price;
        int step = 0;
        if (step_max > 0) {
          step = static_cast<int>(rng.uniform_int(1, step_max));
          if (rng.uniform_below(2) == 0) step = -step;
        }
        int close = candle.open + step;
        if (close > 90) close = 180 - close;
        if (close < 10) close = 20 - close;
        candle.close = close;
        candle.high = std::max(candle.open, candle.close) +
                      (wick_max > 0 ? static_cast<int>(rng.uniform_int(0, wick_max)) : 0);
        candle.low = std::min(candle.open, candle.close) -
                     (wick_max > 0 ? static_cast<int>(rng.uniform_int(0, wick_max)) : 0);
        series.push_back(candle);
        price = close;
      }
      if (candlestick_margin(series) >= 2) break;
    }
    EvaluationItem item;
    item.id = item_id(spec, i);
    item.task_kind = "candlestick";
    item.v = std::make_shared<const Image>(render_candlestick(series));
    item.v_label = candlestick_label(series);
    item.t = kCandlestickQuestion;
    item.gold = candlestick_answer(series);
    item.choices = std::vector<std::string>{"yes", "no"};
    item.seed = static_cast<std::int64_t>(spec.seed);
    item.meta = {{"candles", static_cast<double>(k)},
                 {"critical_features", 4.0 * k}};
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<EvaluationItem> gen_barmax(const GeneratorSpec& spec) {
  bool fixed_m = has_param(spec, "bars");
  int m_param = param_int(spec, "bars", 0);
  if (fixed_m && (m_param < 3 || m_param > 6))
    throw InvalidParams("bars must lie in [3,6]");
  int h_min = param_int(spec, "height_min", 2);
  int h_max = param_int(spec, "height_max", g::kBarHeightCeiling);
  if (h_min < 1 || h_max > g::kBarHeightCeiling || h_min > h_max)
    throw InvalidParams("height range must satisfy 1 <= min <= max <= 24");

  Rng rng(spec.seed);
  std::vector<EvaluationItem> items;
  for (int i = 0; i < spec.n; ++i) {
    std::vector<int> heights;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt >= kMaxResamples)
        throw Exhausted("barmax margin unreachable with given params");
      int m = fixed_m ? m_param : static_cast<int>(rng.uniform_int(3, 6));
      heights.clear();
      for (int b = 0; b < m; ++b)
        heights.push_back(static_cast<int>(rng.uniform_int(h_min, h_max)));
      std::vector<int> sorted = heights;
      std::sort(sorted.begin(), sorted.end());
      bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      if (distinct && sorted[sorted.size() - 1] - sorted[sorted.size() - 2] >= 2) break;
    }
    int m = static_cast<int>(heights.size());
    EvaluationItem item;
    item.id = item_id(spec, i);
    item.task_kind = "barmax";
    item.v = std::make_shared<const Image>(render_bar_chart(heights));
    item.v_label = barmax_label(heights);
    item.t = kBarmaxQuestion;
    item.gold = solve_barmax(heights);
    std::vector<std::string> choices;
    for (int b = 0; b < m; ++b) choices.emplace_back(1, static_cast<char>('A' + b));
    item.choices = std::move(choices);
    item.seed = static_cast<std::int64_t>(spec.seed);
    item.meta = {{"bars", static_cast<double>(m)},
                 {"critical_features", static_cast<double>(m)}};
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<EvaluationItem> gen_textarith(const GeneratorSpec& spec) {
  int lo = param_int(spec, "min_operand", 10);
  int hi = param_int(spec, "max_operand", 99);
  if (lo < 0 || lo > hi) throw InvalidParams("operand range must satisfy 0 <= min <= max");

  Rng rng(spec.seed);
  std::vector<EvaluationItem> items;
  for (int i = 0; i < spec.n; ++i) {
    int a = static_cast<int>(rng.uniform_int(lo, hi));
    int b = static_cast<int>(rng.uniform_int(lo, hi));
    std::string scene = "a=" + std::to_string(a) + ", b=" + std::to_string(b);
    EvaluationItem item;
    item.id = item_id(spec, i);
    item.task_kind = "textarith";
    item.v = std::make_shared<const Image>(render_text_image(scene, RenderConfig{}));
    item.v_label = scene;
    item.t = kTextarithQuestion;
    item.gold = std::to_string(a + b);
    item.seed = static_cast<std::int64_t>(spec.seed);
    item.meta = {{"min_operand", static_cast<double>(lo)},
                 {"max_operand", static_cast<double>(hi)},
                 {"critical_features", static_cast<double>(count_nonspace(scene))}};
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<EvaluationItem> generate(const GeneratorSpec& spec) {
  if (spec.task_kind == "candlestick") return gen_candlestick(spec);
  if (spec.task_kind == "barmax") return gen_barmax(spec);
  if (spec.task_kind == "textarith") return gen_textarith(spec);
  throw UnknownTaskKind("no generator named " + spec.task_kind);
}

std::optional<std::string> oracle_solve_bundle(const std::string& task_kind,
                                               const PromptBundle& bundle,
                                               const RenderConfig& cfg) {
  expected_question(task_kind);  // rejects unknown kinds up front
  switch (bundle.condition) {
    case Condition::SymT: {
      std::string marker = std::string("\n") + kVisualFactsDelimiter + "\n";
      std::size_t pos = bundle.text.find(marker);
      if (pos == std::string::npos) return std::nullopt;
      return solve_from_label(task_kind, bundle.text.substr(pos + marker.size()));
    }
    case Condition::TextOnly:
    case Condition::BaseText:
      // the bare question carries no facts for any built-in task
      return std::nullopt;
    case Condition::Full:
      return solve_from_pixels(task_kind, *bundle.images.at(0), cfg);
    case Condition::SymV: {
      PaneSplit panes = split_composite(*bundle.images.at(0));
      std::string question = decode_centered_text_image(panes.top, cfg);
      if (question != expected_question(task_kind))
        throw Error("symv question pane does not match the task's question");
      return solve_from_pixels(task_kind, panes.bottom, cfg);
    }
  }
  throw Error("unreachable condition");
}

std::optional<std::string> oracle_solve(const EvaluationItem& item, Condition condition,
                                        const RenderConfig& cfg) {
  expected_question(item.task_kind);
  return oracle_solve_bundle(item.task_kind, make_prompt_bundle(item, condition), cfg);
}

}  // namespace ssc
