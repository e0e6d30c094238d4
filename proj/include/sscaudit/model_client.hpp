#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sscaudit/item.hpp"
#include "sscaudit/translate.hpp"

namespace ssc {

struct Transcript {
  std::string item_id;
  Condition condition = Condition::Full;
  std::string raw_text;
  double latency_ms = 0.0;
  int attempt_count = 0;
  bool cache_hit = false;
  std::string model_id;
  std::optional<std::string> error;  // permanent failure; the item scores 0
};

// The uniform surface every back-end satisfies: M(images, text) -> text.
// answer() may be called from several worker threads at once.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string model_id() const = 0;
  virtual Transcript answer(const PromptBundle& bundle) = 0;
};

// Mock back-ends are measurement instruments with closed-form accuracy, so
// unlike real back-ends they may look the item up by id and consult gold and
// generator metadata.
using ItemIndex = std::map<std::string, EvaluationItem>;
ItemIndex make_item_index(const std::vector<EvaluationItem>& items);

struct MockSpec {
  enum class Kind { oracle, blind_prior, lossy_encoder, fusion_failure };
  Kind kind = Kind::oracle;
  double epsilon = 0.0;    // lossy_encoder: per-glyph corruption probability
  double delta = 0.0;      // fusion_failure: mixed-channel penalty
  double q_single = 1.0;   // fusion_failure: single-channel success probability
  double prior_acc = 0.0;  // blind_prior: probability of a correct prior guess
  std::uint64_t seed = 0;

  std::string canonical_id() const;
  void validate() const;  // throws InvalidParams
};

// Per-item latent uniforms are shared across conditions, so condition
// comparisons are paired at the item level and e.g. blind_prior measures
// FoS = 0 exactly rather than up to sampling noise.
//
//   oracle         answers gold wherever oracle_solve finds the bundle
//                  sufficient, "unknown" otherwise; the SSC-compliant ideal
//   blind_prior    gold when the facts are in the bundle's text (symt),
//                  otherwise gold with probability prior_acc; expected
//                  ToS = 1 - prior_acc
//   lossy_encoder  facts arriving through an image survive with probability
//                  (1-eps)^L, L = critical features (+ question glyphs under
//                  symv); expected FoS > 0
//   fusion_failure succeeds with q_single on single-modality bundles and
//                  q_single - delta when both channels are populated;
//                  expected FoS = -delta
std::unique_ptr<ModelClient> make_mock_client(const MockSpec& spec,
                                              std::shared_ptr<const ItemIndex> items,
                                              const RenderConfig& cfg = RenderConfig{});

struct SimFamily {
  double a = 0.35;
  double b = -8.0;
  double phi = 0.7;  // visual-pathway efficiency: p_full = phi * p_symt
  double psi = 1.0;  // integration efficiency:    p_symv = psi * p_full
};

// Simulated model of a given parameter count: p_symt = sigmoid(a ln N + b),
// p_full = phi * p_symt, p_symv = psi * p_full, with one latent uniform per
// item per layer so scores are pointwise ordered symv <= full <= symt.
std::unique_ptr<ModelClient> make_scaled_sim(double scale_params, const SimFamily& family,
                                             std::uint64_t seed,
                                             std::shared_ptr<const ItemIndex> items);

}  // namespace ssc
