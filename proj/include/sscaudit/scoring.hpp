#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sscaudit/item.hpp"
#include "sscaudit/model_client.hpp"

namespace ssc {

// trim + lowercase + strip trailing punctuation; both model output and gold
// go through the same pipeline before comparison
std::string canonicalize_answer(const std::string& raw);

// Exact-match extraction:
//  - choice items: the whole string, a standalone leading choice letter
//    ("b", "b)", "b.", "b:"), or the last whole-word mention of a choice
//  - integer items (no choices, integer gold): first decimal integer token
//  - otherwise the canonicalized string itself
// Returns "" when nothing matches.
std::string extract_answer(const std::string& raw, const EvaluationItem& item);

int score_item(const std::string& canonical, const std::string& gold_canonical);

// Paired per-item 0/1 score matrix. All present conditions cover the same
// item id set, in sorted id order, so bootstrap resamples stay paired.
struct ConditionScores {
  std::vector<std::string> item_ids;  // sorted
  std::map<Condition, std::vector<int>> scores;
  std::string model_id;
  std::optional<std::string> base_model_id;
  int n_failed = 0;  // transcripts that errored; they score 0

  int n() const { return static_cast<int>(item_ids.size()); }
  bool has(Condition c) const { return scores.count(c) > 0; }
  double mean(Condition c) const;
};

// Joins transcripts with their items, scores each, and validates the paired
// design (every condition present for every item). Throws ValidationError.
ConditionScores build_condition_scores(const std::vector<EvaluationItem>& items,
                                       const std::vector<Transcript>& transcripts);

}  // namespace ssc
