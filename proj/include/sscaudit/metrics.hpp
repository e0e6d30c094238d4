#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "sscaudit/scoring.hpp"

namespace ssc {

enum class Diagnosis {
  compliant,
  positive_collapse,
  negative_collapse,
  toll_dominant,
  curse_dominant,
  indeterminate,
};

std::string diagnosis_name(Diagnosis d);

struct Ci {
  double lo = 0.0;
  double hi = 0.0;
};

// tos = s_symt - s_full        penalty of processing vision at all
// cos = s_symt - s_symv        penalty of reading through pixels
// fos = s_full - s_symv        sign localizes the bottleneck
// ssc = max(tos, cos, |fos|)   zero iff integration is faithful
// mg  = s_full - s_textonly    legacy ablation gain (needs textonly)
// ml  = max(0, s_textonly - s_basetext)  legacy leakage (needs basetext);
//       ml_raw keeps the unclamped difference so destructive interference
//       stays visible in the report
struct MetricReport {
  double s_full = 0.0, s_symt = 0.0, s_symv = 0.0;
  std::optional<double> s_textonly, s_basetext;
  double tos = 0.0, cos = 0.0, fos = 0.0, ssc = 0.0;
  std::optional<double> mg, ml, ml_raw;
  std::map<std::string, Ci> ci;  // keys: tos cos fos ssc (mg ml when present)
  Diagnosis diagnosis = Diagnosis::indeterminate;
  int n_items = 0;
  int n_failed = 0;
  int bootstrap_b = 0;
  std::uint64_t bootstrap_seed = 0;
  std::string model_id;
  std::optional<std::string> base_model_id;
};

// Point estimates from condition means. full/symt/symv are required
// (MissingCondition); mg needs textonly and ml needs textonly + basetext,
// otherwise those fields stay absent.
MetricReport compute_metrics(const ConditionScores& scores);

// Paired nonparametric bootstrap: B resamples of the item index set, all
// metrics recomputed per resample, percentile [2.5%, 97.5%] intervals.
// Deterministic given seed. Requires n >= 10 (TooFewItems) and B >= 100.
std::map<std::string, Ci> bootstrap_ci(const ConditionScores& scores, int b,
                                       std::uint64_t seed);

// CI sign tests, most specific first: fos > 0 / fos < 0 localize the
// bottleneck before the broader tos/cos penalties; exact zero (to 1e-9)
// reads compliant; anything else is indeterminate.
Diagnosis diagnose(const MetricReport& report);

// compute_metrics + bootstrap_ci + diagnose in one step
MetricReport analyze_scores(const ConditionScores& scores, int b, std::uint64_t seed);

nlohmann::json report_to_json(const MetricReport& report);
std::string report_to_markdown(const MetricReport& report);

}  // namespace ssc
