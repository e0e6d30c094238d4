#include "sscaudit/audit.hpp"

#include <algorithm>

#include "sscaudit/errors.hpp"
#include "sscaudit/rng.hpp"
#include "sscaudit/scoring.hpp"

namespace ssc {

void AuditConfig::validate() const {
  if (!(sample_rate > 0.0 && sample_rate <= 1.0))
    throw InvalidParams("sample_rate must lie in (0,1]");
  if (window < 50) throw InvalidParams("window must be at least 50 sampled items");
  if (consecutive_k < 1) throw InvalidParams("consecutive_k must be >= 1");
  if (bootstrap_b < 100) throw InvalidParams("bootstrap_b must be >= 100");
}

AuditEngine::AuditEngine(AuditConfig config, ModelClient& client)
    : config_(config), client_(client) {
  config_.validate();
  current_.reserve(config_.window);
}

std::optional<AuditEvent> AuditEngine::ingest(const EvaluationItem& item) {
  std::int64_t position = stream_index_++;
  Rng sampler(mix64(config_.seed, 0x5a3e, static_cast<std::uint64_t>(position)));
  if (sampler.next_double() >= config_.sample_rate) return std::nullopt;

  EvaluationItem ready = item.translated() ? item : translate_item(item, config_.render);
  std::string gold = canonicalize_answer(ready.gold);

  WindowEntry entry;
  entry.item_id = ready.id;
  auto evaluate = [&](Condition c) -> int {
    try {
      Transcript t = client_.answer(make_prompt_bundle(ready, c));
      if (t.error) {
        entry.failed = true;
        return 0;
      }
      return score_item(extract_answer(t.raw_text, ready), gold);
    } catch (const std::exception&) {
      entry.failed = true;  // model errors score 0 and stay counted
      return 0;
    }
  };
  entry.full = evaluate(Condition::Full);
  entry.symt = evaluate(Condition::SymT);
  entry.symv = evaluate(Condition::SymV);
  current_.push_back(std::move(entry));

  if (static_cast<int>(current_.size()) < config_.window) return std::nullopt;

  // window complete: score matrix in id-sorted order, like the batch path
  std::vector<WindowEntry> sorted = current_;
  std::sort(sorted.begin(), sorted.end(),
            [](const WindowEntry& a, const WindowEntry& b) { return a.item_id < b.item_id; });
  ConditionScores scores;
  scores.model_id = client_.model_id();
  std::vector<int> full, symt, symv;
  for (const auto& e : sorted) {
    scores.item_ids.push_back(e.item_id);
    full.push_back(e.full);
    symt.push_back(e.symt);
    symv.push_back(e.symv);
    if (e.failed) ++scores.n_failed;
  }
  scores.scores.emplace(Condition::Full, std::move(full));
  scores.scores.emplace(Condition::SymT, std::move(symt));
  scores.scores.emplace(Condition::SymV, std::move(symv));

  MetricReport report = analyze_scores(scores, config_.bootstrap_b, config_.seed);
  last_report_ = report;

  AuditEvent window_event;
  window_event.type = AuditEvent::Type::window;
  window_event.window_index = window_index_;
  window_event.report = report;
  window_event.first_item_id = current_.front().item_id;
  window_event.last_item_id = current_.back().item_id;
  events_.push_back(window_event);

  current_.clear();
  ++window_index_;

  if (report.ssc > config_.tau) {
    ++violation_streak_;
  } else {
    violation_streak_ = 0;
  }
  if (violation_streak_ >= config_.consecutive_k) {
    AuditEvent alarm = window_event;
    alarm.type = AuditEvent::Type::alarm;
    events_.push_back(alarm);
    return alarm;
  }
  return std::nullopt;
}

MetricReport AuditEngine::snapshot() const {
  if (!last_report_) throw NoCompleteWindow("no window has completed yet");
  return *last_report_;
}

}  // namespace ssc
