#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sscaudit/item.hpp"
#include "sscaudit/translate.hpp"

namespace ssc {

// Deterministic generators of isomorphic tuples. Every generated item is
// solvable from each of the full / symt / symv prompt bundles alone, and the
// oracle below certifies that mechanically, so a measured SSC violation on
// these datasets is a property of the model, not of the data.

struct GeneratorSpec {
  std::string task_kind;  // candlestick | barmax | textarith
  int n = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;  // task-specific overrides
};

std::vector<EvaluationItem> generate(const GeneratorSpec& spec);  // dispatch by task_kind

// candlestick: OHLC integer random walk, question "last close above every
//   earlier high?". params: candles (default 8, >=3), step_max (default 3),
//   wick_max (default 3). Item is resampled until the decision margin is at
//   least 2 price units.
// barmax: 3..6 bars with distinct integer heights, tallest wins by >=2 units.
//   params: bars (per-item 3..6 draw when absent), height_min/height_max
//   (defaults 2/24).
// textarith: the scene itself is rendered text "a=<x>, b=<y>"; only the
//   pixels carry the operands, so textonly is provably insufficient.
//   params: min_operand/max_operand (defaults 10/99).
std::vector<EvaluationItem> gen_candlestick(const GeneratorSpec& spec);
std::vector<EvaluationItem> gen_barmax(const GeneratorSpec& spec);
std::vector<EvaluationItem> gen_textarith(const GeneratorSpec& spec);

inline constexpr const char* kCandlestickQuestion =
    "Does the close of the last candle exceed the maximum high of all earlier candles? "
    "Answer yes or no.";
inline constexpr const char* kBarmaxQuestion = "Which bar is the tallest? Answer with its letter.";
inline constexpr const char* kTextarithQuestion = "Compute a+b. Answer with the integer.";

// Chart geometry. These constants are part of the dataset contract: the
// pixel oracle reads charts back through them, and the margin-enforced
// resampling in the generators guarantees the reading is exact rather than
// approximate.
namespace chartgeom {

// Shared anchor: every chart draws a full-width baseline in ink at the row
// of value zero. The longest horizontal ink run in a pane therefore locates
// the chart's horizontal extent and the baseline row, which makes the
// readers immune to the composite's centering padding.
inline constexpr std::uint8_t kInk = 0;
inline constexpr std::uint8_t kBackground = 255;

// candlestick: price p in [0,100] maps to row y_base - p*kPricePpu.
inline constexpr int kPricePpu = 3;
inline constexpr int kPriceMax = 100;
inline constexpr int kCandleWidth = 7;  // odd, wick on the center column
inline constexpr int kCandleGap = 4;
inline constexpr int kCandleSideMargin = 6;
inline constexpr int kCandleTopMargin = 4;
inline constexpr int kCandleBottomMargin = 4;
inline constexpr std::uint8_t kUpFill = 200;    // close >= open
inline constexpr std::uint8_t kDownFill = 80;   // close < open

// barmax: height h occupies rows [y_base - h*kBarUnit, y_base). Labels are
// glyphs at scale kLabelScale drawn below the baseline, bar i labeled 'A'+i.
inline constexpr int kBarUnit = 5;
inline constexpr int kBarWidth = 13;
inline constexpr int kBarGap = 6;
inline constexpr int kBarSideMargin = 6;
inline constexpr int kBarTopMargin = 4;
inline constexpr int kBarBottomMargin = 4;
inline constexpr int kBarHeightCeiling = 24;
inline constexpr int kLabelScale = 2;
inline constexpr int kLabelPad = 3;

}  // namespace chartgeom

struct Ohlc {
  int open = 0, high = 0, low = 0, close = 0;
};

// Exact pixel readers for generated charts (and their panes inside a symv
// composite). Throw Error subclasses on any geometry mismatch.
std::vector<Ohlc> read_candlestick_chart(const Image& img);
std::vector<int> read_bar_chart(const Image& img);

// Answers using only what the condition's bundle contains: the symbolic
// facts block under symt, pixel readers / the glyph decoder under full and
// symv, and nothing under textonly/basetext (returns nullopt, Insufficient).
// `cfg` is the render config the translator used for t_img panes; textarith
// scenes are always rendered with the default config.
std::optional<std::string> oracle_solve(const EvaluationItem& item, Condition condition,
                                        const RenderConfig& cfg = RenderConfig{});

// Same solver over an already-built bundle (what a model back-end was
// actually shown); task_kind selects the reader.
std::optional<std::string> oracle_solve_bundle(const std::string& task_kind,
                                               const PromptBundle& bundle,
                                               const RenderConfig& cfg = RenderConfig{});

}  // namespace ssc
