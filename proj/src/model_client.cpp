#include "sscaudit/model_client.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>

#include "sscaudit/errors.hpp"
#include "sscaudit/rng.hpp"
#include "sscaudit/taskgen.hpp"

namespace ssc {

namespace {

constexpr std::uint64_t kLatentTag = 0x1a7e;

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

const EvaluationItem& lookup(const ItemIndex& index, const std::string& id) {
  auto it = index.find(id);
  if (it == index.end()) throw ValidationError("unknown item id in bundle: " + id);
  return it->second;
}

double item_latent(std::uint64_t seed, const std::string& item_id, std::uint64_t tag) {
  Rng rng(mix64(mix64(seed, fnv1a64(item_id)), tag));
  return rng.next_double();
}

bool integer_gold(const std::string& gold) {
  if (gold.empty()) return false;
  std::size_t i = gold[0] == '-' ? 1 : 0;
  if (i == gold.size()) return false;
  for (; i < gold.size(); ++i) {
    if (gold[i] < '0' || gold[i] > '9') return false;
  }
  return true;
}

// deterministic incorrect answer, distinct from gold
std::string wrong_answer(const EvaluationItem& item, std::uint64_t seed, Condition condition) {
  Rng rng(mix64(mix64(seed, fnv1a64(item.id)), 0xbad ^ static_cast<std::uint64_t>(condition)));
  if (item.choices && item.choices->size() > 1) {
    std::vector<std::string> others;
    for (const auto& c : *item.choices) {
      if (c != item.gold) others.push_back(c);
    }
    return others[rng.uniform_below(others.size())];
  }
  if (integer_gold(item.gold)) {
    long long v = std::stoll(item.gold);
    return std::to_string(v + 1 + static_cast<long long>(rng.uniform_below(9)));
  }
  return item.gold + "-wrong";
}

int count_nonspace(const std::string& s) {
  int n = 0;
  for (char c : s) {
    if (c != ' ') ++n;
  }
  return n;
}

class MockClient : public ModelClient {
 public:
  MockClient(MockSpec spec, std::shared_ptr<const ItemIndex> items, RenderConfig cfg)
      : spec_(spec), items_(std::move(items)), cfg_(cfg) {
    spec_.validate();
  }

  std::string model_id() const override { return spec_.canonical_id(); }

  Transcript answer(const PromptBundle& bundle) override {
    const EvaluationItem& item = lookup(*items_, bundle.item_id);
    Transcript t;
    t.item_id = bundle.item_id;
    t.condition = bundle.condition;
    t.model_id = model_id();
    t.raw_text = respond(item, bundle);
    return t;
  }

 private:
  // solving a bundle is deterministic per (item, condition), so cache it
  std::optional<std::string> solve(const EvaluationItem& item,
                                   const PromptBundle& bundle) const {
    auto key = std::make_pair(item.id, static_cast<int>(bundle.condition));
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    auto a = oracle_solve_bundle(item.task_kind, bundle, cfg_);
    std::lock_guard<std::mutex> lock(memo_mutex_);
    memo_.emplace(std::move(key), a);
    return a;
  }

  std::string respond(const EvaluationItem& item, const PromptBundle& bundle) const {
    double u = item_latent(spec_.seed, item.id, kLatentTag);
    switch (spec_.kind) {
      case MockSpec::Kind::oracle: {
        auto a = solve(item, bundle);
        return a ? *a : "unknown";
      }
      case MockSpec::Kind::blind_prior: {
        if (bundle.text.find(kVisualFactsDelimiter) != std::string::npos) return item.gold;
        if (u < spec_.prior_acc) return item.gold;
        return wrong_answer(item, spec_.seed, bundle.condition);
      }
      case MockSpec::Kind::lossy_encoder: {
        auto a = solve(item, bundle);
        if (!a) return "unknown";
        if (bundle.images.empty()) return *a;  // facts arrived as discrete text
        double l = item.meta.count("critical_features") ? item.meta.at("critical_features") : 0;
        if (bundle.condition == Condition::SymV) l += count_nonspace(item.t);
        double survive = std::pow(1.0 - spec_.epsilon, l);
        if (u < survive) return *a;
        return wrong_answer(item, spec_.seed, bundle.condition);
      }
      case MockSpec::Kind::fusion_failure: {
        auto a = solve(item, bundle);
        if (!a) return "unknown";
        bool mixed = !bundle.images.empty() && !bundle.text.empty();
        double p = mixed ? spec_.q_single - spec_.delta : spec_.q_single;
        if (u < p) return *a;
        return wrong_answer(item, spec_.seed, bundle.condition);
      }
    }
    throw Error("unreachable mock kind");
  }

  MockSpec spec_;
  std::shared_ptr<const ItemIndex> items_;
  RenderConfig cfg_;
  mutable std::mutex memo_mutex_;
  mutable std::map<std::pair<std::string, int>, std::optional<std::string>> memo_;
};

class ScaledSimClient : public ModelClient {
 public:
  ScaledSimClient(double scale, SimFamily family, std::uint64_t seed,
                  std::shared_ptr<const ItemIndex> items)
      : scale_(scale), family_(family), seed_(seed), items_(std::move(items)) {
    if (!(scale > 0)) throw InvalidParams("sim scale must be positive");
    if (!(family.phi > 0 && family.phi <= 1)) throw InvalidParams("phi must lie in (0,1]");
    if (!(family.psi > 0 && family.psi <= 1)) throw InvalidParams("psi must lie in (0,1]");
    p_symt_ = 1.0 / (1.0 + std::exp(-(family.a * std::log(scale) + family.b)));
  }

  std::string model_id() const override {
    return "sim:N=" + fmt_g(scale_) + ",a=" + fmt_g(family_.a) + ",b=" + fmt_g(family_.b) +
           ",phi=" + fmt_g(family_.phi) + ",psi=" + fmt_g(family_.psi);
  }

  Transcript answer(const PromptBundle& bundle) override {
    const EvaluationItem& item = lookup(*items_, bundle.item_id);
    bool symt_ok = item_latent(seed_, item.id, 1) < p_symt_;
    bool full_ok = symt_ok && item_latent(seed_, item.id, 2) < family_.phi;
    bool symv_ok = full_ok && item_latent(seed_, item.id, 3) < family_.psi;
    bool ok = false;
    switch (bundle.condition) {
      case Condition::Full: ok = full_ok; break;
      case Condition::SymV: ok = symv_ok; break;
      case Condition::SymT:
      case Condition::TextOnly:
      case Condition::BaseText: ok = symt_ok; break;
    }
    Transcript t;
    t.item_id = bundle.item_id;
    t.condition = bundle.condition;
    t.model_id = model_id();
    t.raw_text = ok ? item.gold : wrong_answer(item, seed_, bundle.condition);
    return t;
  }

 private:
  double scale_;
  SimFamily family_;
  std::uint64_t seed_;
  std::shared_ptr<const ItemIndex> items_;
  double p_symt_;
};

}  // namespace

ItemIndex make_item_index(const std::vector<EvaluationItem>& items) {
  ItemIndex index;
  for (const auto& item : items) index.emplace(item.id, item);
  return index;
}

void MockSpec::validate() const {
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!prob(epsilon) || !prob(delta) || !prob(q_single) || !prob(prior_acc))
    throw InvalidParams("mock probabilities must lie in [0,1]");
  if (delta > q_single) throw InvalidParams("delta must not exceed q_single");
}

std::string MockSpec::canonical_id() const {
  switch (kind) {
    case Kind::oracle: return "mock:oracle";
    case Kind::blind_prior: return "mock:blind_prior:prior_acc=" + fmt_g(prior_acc);
    case Kind::lossy_encoder: return "mock:lossy_encoder:epsilon=" + fmt_g(epsilon);
    case Kind::fusion_failure:
      return "mock:fusion_failure:q=" + fmt_g(q_single) + ",delta=" + fmt_g(delta);
  }
  throw Error("unreachable mock kind");
}

std::unique_ptr<ModelClient> make_mock_client(const MockSpec& spec,
                                              std::shared_ptr<const ItemIndex> items,
                                              const RenderConfig& cfg) {
  return std::make_unique<MockClient>(spec, std::move(items), cfg);
}

std::unique_ptr<ModelClient> make_scaled_sim(double scale_params, const SimFamily& family,
                                             std::uint64_t seed,
                                             std::shared_ptr<const ItemIndex> items) {
  return std::make_unique<ScaledSimClient>(scale_params, family, seed, std::move(items));
}

}  // namespace ssc
