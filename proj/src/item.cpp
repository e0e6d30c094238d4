#include "sscaudit/item.hpp"

#include <algorithm>

#include "sscaudit/errors.hpp"

namespace ssc {

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::Full: return "full";
    case Condition::SymT: return "symt";
    case Condition::SymV: return "symv";
    case Condition::TextOnly: return "textonly";
    case Condition::BaseText: return "basetext";
  }
  throw ValidationError("unknown condition value");
}

Condition parse_condition(const std::string& name) {
  for (Condition c : kAllConditions) {
    if (condition_name(c) == name) return c;
  }
  throw ValidationError("unknown condition name: " + name);
}

std::vector<Violation> validate_item(const EvaluationItem& item) {
  std::vector<Violation> out;
  if (item.id.empty()) out.push_back({"id", "empty-id"});
  if (item.choices) {
    if (item.choices->empty()) {
      out.push_back({"choices", "empty-choices"});
    } else if (std::find(item.choices->begin(), item.choices->end(), item.gold) ==
               item.choices->end()) {
      out.push_back({"gold", "gold-not-in-choices"});
    }
  }
  if (item.v && item.v_label.empty()) out.push_back({"v_label", "empty-v-label"});
  if ((item.t_img == nullptr) != (item.symv_composite == nullptr))
    out.push_back({"t_img", "translation-pairing"});
  if (item.t.find(kVisualFactsDelimiter) != std::string::npos)
    out.push_back({"t", "contains-delimiter"});
  if (item.v_label.find(kVisualFactsDelimiter) != std::string::npos)
    out.push_back({"v_label", "contains-delimiter"});
  return out;
}

PromptBundle make_prompt_bundle(const EvaluationItem& item, Condition condition) {
  PromptBundle bundle;
  bundle.condition = condition;
  bundle.item_id = item.id;
  switch (condition) {
    case Condition::Full:
      if (!item.v) throw MissingImage("item " + item.id + " has no scene image");
      bundle.images.push_back(item.v);
      bundle.text = item.t;
      break;
    case Condition::SymT:
      bundle.text = item.t + "\n" + kVisualFactsDelimiter + "\n" + item.v_label;
      break;
    case Condition::SymV:
      if (!item.v) throw MissingImage("item " + item.id + " has no scene image");
      if (!item.symv_composite)
        throw MissingTranslation("item " + item.id + " requested under symv before translation");
      bundle.images.push_back(item.symv_composite);
      break;
    case Condition::TextOnly:
    case Condition::BaseText:
      bundle.text = item.t;
      break;
  }
  return bundle;
}

}  // namespace ssc
