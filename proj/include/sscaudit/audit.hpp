#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "sscaudit/metrics.hpp"
#include "sscaudit/model_client.hpp"
#include "sscaudit/translate.hpp"

namespace ssc {

struct AuditConfig {
  double sample_rate = 1.0;  // Bernoulli(r) per stream item
  int window = 200;          // sampled items per tumbling window
  double tau = 0.05;         // ssc alarm threshold
  int consecutive_k = 1;     // violating windows required to alarm
  std::uint64_t seed = 0;
  int bootstrap_b = 200;  // smaller than the batch default to bound latency
  RenderConfig render;

  void validate() const;  // window >= 50, k >= 1, rate in (0,1]
};

struct AuditEvent {
  enum class Type { window, alarm };
  Type type = Type::window;
  int window_index = 0;
  MetricReport report;
  std::string first_item_id;  // stream order within the window
  std::string last_item_id;
};

// Tumbling-window monitor: each ingested item is sampled with Bernoulli(r);
// sampled items are translated on the fly (already-translated items are used
// as-is), evaluated under full/symt/symv, and scored into the current
// window. Completed windows emit a window event; ssc > tau for
// consecutive_k windows in a row raises an alarm. With r=1 and a single
// window spanning the stream, the window report matches the batch pipeline
// bit for bit (same id-sorted matrix, same bootstrap seed).
class AuditEngine {
 public:
  AuditEngine(AuditConfig config, ModelClient& client);

  std::optional<AuditEvent> ingest(const EvaluationItem& item);

  // every window/alarm event emitted so far, in order
  const std::vector<AuditEvent>& events() const { return events_; }

  MetricReport snapshot() const;  // most recent completed window; NoCompleteWindow

  std::int64_t stream_position() const { return stream_index_; }

 private:
  struct WindowEntry {
    std::string item_id;
    int full = 0, symt = 0, symv = 0;
    bool failed = false;
  };

  AuditConfig config_;
  ModelClient& client_;
  std::int64_t stream_index_ = 0;
  int window_index_ = 0;
  int violation_streak_ = 0;
  std::vector<WindowEntry> current_;
  std::vector<AuditEvent> events_;
  std::optional<MetricReport> last_report_;
};

}  // namespace ssc
