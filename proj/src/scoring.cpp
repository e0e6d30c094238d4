#include "sscaudit/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "sscaudit/errors.hpp"

namespace ssc {

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// last whole-word occurrence of any choice; longer choices win ties at the
// same position
std::optional<std::size_t> find_choice_mention(const std::string& text,
                                               const std::vector<std::string>& choices) {
  std::optional<std::size_t> best_pos;
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t ci = 0; ci < choices.size(); ++ci) {
    const std::string& c = choices[ci];
    if (c.empty()) continue;
    std::size_t from = 0;
    while (true) {
      std::size_t pos = text.find(c, from);
      if (pos == std::string::npos) break;
      bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
      std::size_t end = pos + c.size();
      bool right_ok = end == text.size() || !is_word_char(text[end]);
      if (left_ok && right_ok) {
        if (!best_pos || pos > best_start || (pos == best_start && c.size() > best_len)) {
          best_pos = ci;
          best_start = pos;
          best_len = c.size();
        }
      }
      from = pos + 1;
    }
  }
  return best_pos;
}

// canonical integer text, no length limit: sign + digits without leading zeros
std::string canonical_integer(bool negative, std::string_view digits) {
  std::size_t nz = digits.find_first_not_of('0');
  if (nz == std::string_view::npos) return "0";
  std::string out;
  if (negative) out.push_back('-');
  out.append(digits.substr(nz));
  return out;
}

std::string first_integer_token(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      bool negative = i > 0 && text[i - 1] == '-' && (i == 1 || !is_word_char(text[i - 2]));
      std::size_t end = i;
      while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
      return canonical_integer(negative, std::string_view(text).substr(i, end - i));
    }
  }
  return "";
}

}  // namespace

std::string canonicalize_answer(const std::string& raw) {
  std::size_t begin = raw.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = raw.find_last_not_of(" \t\r\n");
  std::string s = raw.substr(begin, end - begin + 1);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::string punct = ".!?:;,";
  while (!s.empty() && (punct.find(s.back()) != std::string::npos || s.back() == ' '))
    s.pop_back();
  return s;
}

std::string extract_answer(const std::string& raw, const EvaluationItem& item) {
  std::string s = canonicalize_answer(raw);
  if (item.choices && !item.choices->empty()) {
    std::vector<std::string> choices;
    choices.reserve(item.choices->size());
    for (const auto& c : *item.choices) choices.push_back(canonicalize_answer(c));

    for (const auto& c : choices) {
      if (s == c) return c;
    }
    // standalone leading letter, e.g. "b", "b)", "b: because ..."
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') {
      bool delim = s.size() == 1 || s[1] == ')' || s[1] == '.' || s[1] == ':';
      if (delim) {
        std::size_t idx = static_cast<std::size_t>(s[0] - 'a');
        if (idx < choices.size()) return choices[idx];
      }
    }
    if (auto ci = find_choice_mention(s, choices)) return choices[*ci];
    return "";
  }
  if (integer_literal(canonicalize_answer(item.gold))) {
    return first_integer_token(s);
  }
  return s;
}

int score_item(const std::string& canonical, const std::string& gold_canonical) {
  return !canonical.empty() && canonical == gold_canonical ? 1 : 0;
}

double ConditionScores::mean(Condition c) const {
  const auto& v = scores.at(c);
  if (v.empty()) return 0.0;
  long long sum = 0;
  for (int s : v) sum += s;
  return static_cast<double>(sum) / static_cast<double>(v.size());
}

ConditionScores build_condition_scores(const std::vector<EvaluationItem>& items,
                                       const std::vector<Transcript>& transcripts) {
  std::map<std::string, const EvaluationItem*> by_id;
  for (const auto& item : items) by_id.emplace(item.id, &item);

  std::map<Condition, std::map<std::string, const Transcript*>> grouped;
  for (const auto& t : transcripts) {
    if (!by_id.count(t.item_id))
      throw ValidationError("transcript references unknown item " + t.item_id);
    auto [it, inserted] = grouped[t.condition].emplace(t.item_id, &t);
    if (!inserted)
      throw ValidationError("duplicate transcript for (" + t.item_id + ", " +
                            condition_name(t.condition) + ")");
  }
  if (grouped.empty()) throw ValidationError("no transcripts supplied");

  // paired design: every condition must cover the same item ids
  std::set<std::string> ids;
  for (const auto& [c, m] : grouped) {
    for (const auto& [id, t] : m) ids.insert(id);
  }
  for (const auto& [c, m] : grouped) {
    if (m.size() != ids.size())
      throw ValidationError("condition " + condition_name(c) +
                            " does not cover every item (paired design violated)");
  }

  ConditionScores out;
  out.item_ids.assign(ids.begin(), ids.end());
  for (const auto& [c, m] : grouped) {
    std::vector<int> v;
    v.reserve(out.item_ids.size());
    for (const auto& id : out.item_ids) {
      const Transcript& t = *m.at(id);
      const EvaluationItem& item = *by_id.at(id);
      if (t.error) {
        ++out.n_failed;
        v.push_back(0);
        continue;
      }
      std::string canonical = extract_answer(t.raw_text, item);
      v.push_back(score_item(canonical, canonicalize_answer(item.gold)));
    }
    out.scores.emplace(c, std::move(v));
  }

  for (const auto& t : transcripts) {
    if (t.condition != Condition::BaseText) {
      out.model_id = t.model_id;
      break;
    }
  }
  for (const auto& t : transcripts) {
    if (t.condition == Condition::BaseText) {
      out.base_model_id = t.model_id;
      break;
    }
  }
  return out;
}

}  // namespace ssc
