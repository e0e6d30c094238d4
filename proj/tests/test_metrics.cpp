#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sscaudit/errors.hpp"
#include "sscaudit/metrics.hpp"
#include "sscaudit/rng.hpp"

using namespace ssc;

namespace {

// exact-score helper: n items, k_cond of them correct per condition
ConditionScores scores_with(int n, std::map<Condition, int> correct) {
  ConditionScores s;
  for (int i = 0; i < n; ++i) s.item_ids.push_back("item-" + std::to_string(i));
  for (auto& [c, k] : correct) {
    std::vector<int> v(n, 0);
    for (int i = 0; i < k; ++i) v[i] = 1;
    s.scores.emplace(c, std::move(v));
  }
  s.model_id = "test";
  return s;
}

}  // namespace

TEST_CASE("metric formula fidelity on the reference fixtures") {
  // 0.95 symbolic ceiling vs 0.60 full -> toll of 0.35
  auto a = compute_metrics(scores_with(
      100, {{Condition::Full, 60}, {Condition::SymT, 95}, {Condition::SymV, 60}}));
  CHECK(a.tos == doctest::Approx(0.35).epsilon(1e-12));
  // 0.95 vs 0.80 -> toll of 0.15
  auto b = compute_metrics(scores_with(
      100, {{Condition::Full, 80}, {Condition::SymT, 95}, {Condition::SymV, 80}}));
  CHECK(b.tos == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("identity case: equal conditions zero every metric") {
  auto r = compute_metrics(scores_with(
      50, {{Condition::Full, 30}, {Condition::SymT, 30}, {Condition::SymV, 30}}));
  CHECK(r.tos == 0.0);
  CHECK(r.cos == 0.0);
  CHECK(r.fos == 0.0);
  CHECK(r.ssc == 0.0);
}

TEST_CASE("ml clamps destructive interference but the raw difference survives") {
  auto r = compute_metrics(scores_with(100, {{Condition::Full, 70},
                                             {Condition::SymT, 90},
                                             {Condition::SymV, 80},
                                             {Condition::TextOnly, 40},
                                             {Condition::BaseText, 50}}));
  REQUIRE(r.ml.has_value());
  CHECK(*r.ml == 0.0);
  CHECK(*r.ml_raw == doctest::Approx(-0.10).epsilon(1e-12));
  REQUIRE(r.mg.has_value());
  CHECK(*r.mg == doctest::Approx(0.30).epsilon(1e-12));
}

TEST_CASE("mg and ml are absent without their prerequisite conditions") {
  auto r = compute_metrics(scores_with(
      20, {{Condition::Full, 10}, {Condition::SymT, 15}, {Condition::SymV, 9}}));
  CHECK(!r.mg.has_value());
  CHECK(!r.ml.has_value());
  auto r2 = compute_metrics(scores_with(20, {{Condition::Full, 10},
                                             {Condition::SymT, 15},
                                             {Condition::SymV, 9},
                                             {Condition::TextOnly, 5}}));
  CHECK(r2.mg.has_value());
  CHECK(!r2.ml.has_value());
}

TEST_CASE("missing protocol condition is an error") {
  CHECK_THROWS_AS(
      compute_metrics(scores_with(20, {{Condition::Full, 10}, {Condition::SymT, 15}})),
      MissingCondition);
}

TEST_CASE("identity suite over random score triples") {
  Rng rng(424242);
  for (int i = 0; i < 10000; ++i) {
    int n = 10 + static_cast<int>(rng.uniform_below(90));
    auto s = scores_with(n, {{Condition::Full, static_cast<int>(rng.uniform_below(n + 1))},
                             {Condition::SymT, static_cast<int>(rng.uniform_below(n + 1))},
                             {Condition::SymV, static_cast<int>(rng.uniform_below(n + 1))},
                             {Condition::TextOnly, static_cast<int>(rng.uniform_below(n + 1))},
                             {Condition::BaseText, static_cast<int>(rng.uniform_below(n + 1))}});
    auto r = compute_metrics(s);
    CHECK(std::fabs(r.fos - (r.cos - r.tos)) <= 1e-12);
    CHECK(r.ssc == std::max({r.tos, r.cos, std::fabs(r.fos)}));
    CHECK(r.ssc >= 0.0);
    CHECK(*r.ml >= 0.0);
    if (*r.s_textonly <= *r.s_basetext) CHECK(*r.ml == 0.0);
    // ssc = 0 exactly when no metric is positive and fos vanishes
    if (r.ssc == 0.0) {
      CHECK(r.tos <= 0.0);
      CHECK(r.cos <= 0.0);
      CHECK(r.fos == 0.0);
    }
  }
}

TEST_CASE("metrics are invariant under item permutation") {
  Rng rng(7);
  ConditionScores s;
  int n = 40;
  for (int i = 0; i < n; ++i) s.item_ids.push_back("i" + std::to_string(i));
  for (Condition c : kProtocolConditions) {
    std::vector<int> v(n);
    for (auto& x : v) x = static_cast<int>(rng.uniform_below(2));
    s.scores.emplace(c, v);
  }
  auto base = compute_metrics(s);

  // rotate items (ids and all score rows together)
  ConditionScores rotated = s;
  std::rotate(rotated.item_ids.begin(), rotated.item_ids.begin() + 11, rotated.item_ids.end());
  for (auto& [c, v] : rotated.scores) std::rotate(v.begin(), v.begin() + 11, v.end());
  auto r = compute_metrics(rotated);
  CHECK(r.tos == base.tos);
  CHECK(r.cos == base.cos);
  CHECK(r.fos == base.fos);
  CHECK(r.ssc == base.ssc);
}

TEST_CASE("bootstrap is deterministic and degenerate on perfect scores") {
  auto perfect = scores_with(
      50, {{Condition::Full, 50}, {Condition::SymT, 50}, {Condition::SymV, 50}});
  auto ci1 = bootstrap_ci(perfect, 200, 9);
  auto ci2 = bootstrap_ci(perfect, 200, 9);
  for (const auto& [name, interval] : ci1) {
    CHECK(interval.lo == ci2.at(name).lo);
    CHECK(interval.hi == ci2.at(name).hi);
    CHECK(interval.lo == 0.0);
    CHECK(interval.hi == 0.0);
  }
  auto ci3 = bootstrap_ci(perfect, 200, 10);
  CHECK(ci3.count("tos") == 1);
}

TEST_CASE("interval endpoints bracket the point estimate") {
  Rng rng(88);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 30 + static_cast<int>(rng.uniform_below(50));
    auto s = scores_with(n, {{Condition::Full, static_cast<int>(rng.uniform_below(n + 1))},
                             {Condition::SymT, static_cast<int>(rng.uniform_below(n + 1))},
                             {Condition::SymV, static_cast<int>(rng.uniform_below(n + 1))}});
    auto r = compute_metrics(s);
    auto ci = bootstrap_ci(s, 500, trial);
    CHECK(ci.at("tos").lo <= r.tos + 1e-12);
    CHECK(ci.at("tos").hi >= r.tos - 1e-12);
    CHECK(ci.at("ssc").lo <= r.ssc + 1e-12);
    CHECK(ci.at("ssc").hi >= r.ssc - 1e-12);
  }
}

TEST_CASE("bootstrap input guards") {
  auto tiny =
      scores_with(5, {{Condition::Full, 3}, {Condition::SymT, 3}, {Condition::SymV, 3}});
  CHECK_THROWS_AS(bootstrap_ci(tiny, 200, 1), TooFewItems);
  auto ok =
      scores_with(20, {{Condition::Full, 10}, {Condition::SymT, 12}, {Condition::SymV, 9}});
  CHECK_THROWS_AS(bootstrap_ci(ok, 50, 1), InvalidParams);
}

TEST_CASE("diagnose follows the ci sign priority") {
  MetricReport r;
  r.ssc = 0.4;
  r.ci["fos"] = {0.1, 0.3};
  r.ci["tos"] = {0.2, 0.5};
  r.ci["cos"] = {0.2, 0.5};
  CHECK(diagnose(r) == Diagnosis::positive_collapse);
  r.ci["fos"] = {-0.3, -0.1};
  CHECK(diagnose(r) == Diagnosis::negative_collapse);
  r.ci["fos"] = {-0.1, 0.1};
  CHECK(diagnose(r) == Diagnosis::toll_dominant);
  r.ci["tos"] = {-0.1, 0.5};
  CHECK(diagnose(r) == Diagnosis::curse_dominant);
  r.ci["cos"] = {-0.1, 0.5};
  CHECK(diagnose(r) == Diagnosis::indeterminate);
  MetricReport zero;
  zero.ssc = 0.0;
  zero.ci["fos"] = {0.0, 0.0};
  zero.ci["tos"] = {0.0, 0.0};
  zero.ci["cos"] = {0.0, 0.0};
  CHECK(diagnose(zero) == Diagnosis::compliant);
}

TEST_CASE("report json carries the exact field names") {
  auto s = scores_with(20, {{Condition::Full, 10},
                            {Condition::SymT, 15},
                            {Condition::SymV, 9},
                            {Condition::TextOnly, 8},
                            {Condition::BaseText, 12}});
  auto r = analyze_scores(s, 200, 5);
  auto j = report_to_json(r);
  for (const char* key : {"s_full", "s_symt", "s_symv", "s_textonly", "s_basetext", "tos",
                          "cos", "fos", "ssc", "mg", "ml", "ci", "diagnosis", "n_items",
                          "bootstrap"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }
  CHECK(j["bootstrap"]["b"] == 200);
  CHECK(j["bootstrap"]["seed"] == 5);
  CHECK(j["ci"]["tos"].is_array());
  std::string md = report_to_markdown(r);
  CHECK(md.find("| tos |") != std::string::npos);
  CHECK(md.find("diagnosis:") != std::string::npos);
}
