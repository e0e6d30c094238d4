#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sscaudit/image.hpp"

namespace ssc {

// The five input modulations a model can be evaluated under. full/symt/symv
// form the translation protocol proper; textonly and basetext exist so the
// legacy ablation metrics (MG/ML) stay computable for comparison.
enum class Condition { Full, SymT, SymV, TextOnly, BaseText };

constexpr Condition kAllConditions[] = {Condition::Full, Condition::SymT, Condition::SymV,
                                        Condition::TextOnly, Condition::BaseText};
constexpr Condition kProtocolConditions[] = {Condition::Full, Condition::SymT, Condition::SymV};

std::string condition_name(Condition c);
Condition parse_condition(const std::string& name);  // throws ValidationError

// One isomorphic tuple: a scene image V, its exhaustive symbolic text
// rendering v_label, the question t, and (after translation) the question
// rendered as pixels plus the all-image composite.
struct EvaluationItem {
  std::string id;
  std::string task_kind;
  std::shared_ptr<const Image> v;
  std::string v_label;
  std::string t;
  std::shared_ptr<const Image> t_img;           // filled by the translator
  std::shared_ptr<const Image> symv_composite;  // filled by the translator
  std::string gold;
  std::optional<std::vector<std::string>> choices;
  std::int64_t seed = 0;
  std::map<std::string, double> meta;

  bool translated() const { return t_img != nullptr && symv_composite != nullptr; }
};

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate_item(const EvaluationItem& item);

// Fixed line separating the question from the symbolic facts in symt prompts.
// Generators must never emit it inside t or v_label.
inline constexpr const char* kVisualFactsDelimiter = "---VISUAL FACTS---";

struct PromptBundle {
  std::vector<std::shared_ptr<const Image>> images;
  std::string text;
  Condition condition = Condition::Full;
  std::string item_id;
};

// Pure function of (item, condition); byte-for-byte deterministic.
//   full     -> images=[v],               text=t
//   symt     -> images=[],                text=t + "\n" + delimiter + "\n" + v_label
//   symv     -> images=[symv_composite],  text=""
//   textonly -> images=[],                text=t
//   basetext -> images=[],                text=t
// Throws MissingImage (full/symv without v) or MissingTranslation (symv
// before the translator has run).
PromptBundle make_prompt_bundle(const EvaluationItem& item, Condition condition);

}  // namespace ssc
