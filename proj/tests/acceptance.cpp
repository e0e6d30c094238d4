// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured numbers and its runtime.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "sscaudit/audit.hpp"
#include "sscaudit/dataset.hpp"
#include "sscaudit/metrics.hpp"
#include "sscaudit/model_client.hpp"
#include "sscaudit/rng.hpp"
#include "sscaudit/runner.hpp"
#include "sscaudit/scaling.hpp"
#include "sscaudit/taskgen.hpp"
#include "sscaudit/translate.hpp"

using namespace ssc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double seconds, double budget_seconds) {
  std::printf("ACCEPTANCE %2d [%s]: %s — %s (%.1fs, budget %.0fs)\n", criterion, name.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str(), seconds, budget_seconds);
  std::fflush(stdout);
  CHECK_MESSAGE(pass, "criterion ", criterion, " (", name, "): ", detail);
  CHECK_MESSAGE(seconds < budget_seconds, "criterion ", criterion, " over time budget");
}

fs::path scratch_root() {
  static fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "sscaudit-acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int run_cli(const std::string& args, std::string* stdout_text = nullptr) {
  std::string cmd = std::string(SSCAUDIT_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, n);
  int status = pclose(pipe);
  if (stdout_text) *stdout_text = out;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

json read_json(const fs::path& p) { return json::parse(file_bytes(p)); }

ConditionScores scores_with(int n, std::map<Condition, int> correct) {
  ConditionScores s;
  for (int i = 0; i < n; ++i) s.item_ids.push_back("item-" + std::to_string(i));
  for (auto& [c, k] : correct) {
    std::vector<int> v(n, 0);
    for (int i = 0; i < k; ++i) v[i] = 1;
    s.scores.emplace(c, std::move(v));
  }
  s.model_id = "fixture";
  return s;
}

std::vector<EvaluationItem> translated(const std::string& task, int n, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.task_kind = task;
  spec.n = n;
  spec.seed = seed;
  auto items = generate(spec);
  for (auto& item : items) item = translate_item(item, RenderConfig{});
  return items;
}

// the audit test double: a production model drifting at a known stream point
class SwitchingClient : public ModelClient {
 public:
  SwitchingClient(ModelClient& before, ModelClient& after, int switch_at)
      : before_(before), after_(after), switch_at_(switch_at) {}
  std::string model_id() const override { return before_.model_id(); }
  Transcript answer(const PromptBundle& bundle) override {
    return position_ >= switch_at_ ? after_.answer(bundle) : before_.answer(bundle);
  }
  void mark_item(int stream_position) { position_ = stream_position; }

 private:
  ModelClient& before_;
  ModelClient& after_;
  int switch_at_;
  int position_ = 0;
};

}  // namespace

TEST_CASE("criterion 1: metric formula fidelity") {
  Timer timer;
  auto a = compute_metrics(scores_with(
      100, {{Condition::Full, 60}, {Condition::SymT, 95}, {Condition::SymV, 60}}));
  auto b = compute_metrics(scores_with(
      100, {{Condition::Full, 80}, {Condition::SymT, 95}, {Condition::SymV, 80}}));
  bool pass = std::fabs(a.tos - 0.35) <= 1e-12 && std::fabs(b.tos - 0.15) <= 1e-12;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "tos(0.95,0.60)=%.15f tos(0.95,0.80)=%.15f", a.tos,
                b.tos);
  report(1, "metric-fidelity", pass, detail, timer.seconds(), 1.0);
}

TEST_CASE("criterion 2: identity suite over 10,000 random score triples") {
  Timer timer;
  Rng rng(20260808);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    int n = 10 + static_cast<int>(rng.uniform_below(190));
    auto draw = [&] { return static_cast<int>(rng.uniform_below(n + 1)); };
    auto r = compute_metrics(scores_with(n, {{Condition::Full, draw()},
                                             {Condition::SymT, draw()},
                                             {Condition::SymV, draw()},
                                             {Condition::TextOnly, draw()},
                                             {Condition::BaseText, draw()}}));
    bool ok = std::fabs(r.fos - (r.cos - r.tos)) <= 1e-12 &&
              r.ssc == std::max({r.tos, r.cos, std::fabs(r.fos)}) && r.ssc >= 0.0 &&
              *r.ml >= 0.0 && (*r.s_textonly > *r.s_basetext || *r.ml == 0.0);
    if (!ok) ++violations;
  }
  char detail[64];
  std::snprintf(detail, sizeof(detail), "%d/10000 triples violated an identity", violations);
  report(2, "identity-suite", violations == 0, detail, timer.seconds(), 5.0);
}

TEST_CASE("criterion 3: translation losslessness") {
  Timer timer;
  RenderConfig cfg;
  Rng rng(31337);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    int len = static_cast<int>(rng.uniform_below(201));
    std::string s;
    for (int j = 0; j < len; ++j) {
      s.push_back(rng.uniform_below(14) == 0
                      ? '\n'
                      : static_cast<char>(0x20 + rng.uniform_below(95)));
    }
    if (decode_text_image(render_text_image(s, cfg), cfg) != s) ++failures;
  }
  std::string all;
  for (char c = 0x20;; ++c) {
    all.push_back(c);
    if (c == 0x7e) break;
  }
  if (decode_text_image(render_text_image(all, cfg), cfg) != all) ++failures;
  char detail[64];
  std::snprintf(detail, sizeof(detail), "%d/1001 round trips failed", failures);
  report(3, "translation-losslessness", failures == 0, detail, timer.seconds(), 30.0);
}

TEST_CASE("criterion 4: dataset semantic sufficiency at n=500 per generator") {
  Timer timer;
  RenderConfig cfg;
  int insufficient = 0, wrong = 0, textonly_leaks = 0;
  for (const char* task : {"candlestick", "barmax", "textarith"}) {
    auto items = translated(task, 500, 2024);
    for (const auto& item : items) {
      for (Condition c : kProtocolConditions) {
        auto answer = oracle_solve(item, c, cfg);
        if (!answer) {
          ++insufficient;
        } else if (*answer != item.gold) {
          ++wrong;
        }
      }
    }
    if (std::string(task) == "textarith") {
      for (const auto& item : items) {
        if (oracle_solve(item, Condition::TextOnly, cfg).has_value()) ++textonly_leaks;
      }
    }
  }
  bool pass = insufficient == 0 && wrong == 0 && textonly_leaks == 0;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "4500 oracle solves: %d insufficient, %d wrong; textarith textonly leaks: %d/500",
                insufficient, wrong, textonly_leaks);
  report(4, "semantic-sufficiency", pass, detail, timer.seconds(), 120.0);
}

TEST_CASE("criterion 5: mock-model analytics end-to-end through the cli") {
  Timer timer;
  fs::path dir = scratch_root() / "c5";
  std::string raw = (dir / "raw").string();
  std::string ds = (dir / "ds").string();
  REQUIRE(run_cli("gen --task barmax --n 2000 --seed 1001 --out " + raw) == 0);
  REQUIRE(run_cli("translate --in " + raw + "/items.jsonl --out " + ds) == 0);

  auto run_and_report = [&](const std::string& model, const std::string& tag) {
    std::string transcripts = (dir / (tag + ".jsonl")).string();
    std::string report_path = (dir / (tag + "-report.json")).string();
    REQUIRE(run_cli("run --items " + ds + "/items.jsonl --model " + model + " --out " +
                    transcripts) == 0);
    REQUIRE(run_cli("metrics --items " + ds + "/items.jsonl --transcripts " + transcripts +
                    " --out-json " + report_path + " --bootstrap-b 1000 --bootstrap-seed 7") ==
            0);
    return read_json(report_path);
  };

  json prior = run_and_report("mock:blind_prior:prior_acc=0.25,seed=41", "prior");
  json fusion = run_and_report("mock:fusion_failure:q=0.9,delta=0.2,seed=43", "fusion");
  json lossy = run_and_report("mock:lossy_encoder:epsilon=0.05,seed=47", "lossy");

  double tos = prior["tos"];
  double fos = fusion["fos"];
  bool prior_ok = std::fabs(tos - 0.75) <= 0.03 && prior["diagnosis"] == "toll_dominant";
  bool fusion_ok =
      std::fabs(fos - (-0.20)) <= 0.03 && fusion["diagnosis"] == "negative_collapse";
  bool lossy_ok = lossy["diagnosis"] == "positive_collapse";
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "blind_prior tos=%.4f (%s), fusion fos=%.4f (%s), lossy %s", tos,
                prior["diagnosis"].get<std::string>().c_str(), fos,
                fusion["diagnosis"].get<std::string>().c_str(),
                lossy["diagnosis"].get<std::string>().c_str());
  report(5, "mock-analytics-cli", prior_ok && fusion_ok && lossy_ok, detail, timer.seconds(),
         180.0);
  fs::remove_all(dir);
}

TEST_CASE("criterion 6: oracle compliance on every generator") {
  Timer timer;
  bool pass = true;
  std::string detail;
  for (const char* task : {"candlestick", "barmax", "textarith"}) {
    auto items = translated(task, 200, 606);
    auto index = std::make_shared<const ItemIndex>(make_item_index(items));
    MockSpec spec;
    spec.kind = MockSpec::Kind::oracle;
    auto client = make_mock_client(spec, index);
    RunOutput out = run_protocol(items, *client, RunOptions{});
    MetricReport r = analyze_scores(build_condition_scores(items, out.transcripts), 300, 11);
    bool ok = r.ssc == 0.0 && r.diagnosis == Diagnosis::compliant;
    pass = pass && ok;
    detail += std::string(task) + " ssc=" + std::to_string(r.ssc) + " " +
              diagnosis_name(r.diagnosis) + "; ";
  }
  report(6, "oracle-compliance", pass, detail, timer.seconds(), 60.0);
}

TEST_CASE("criterion 7: divergence law in simulation") {
  Timer timer;
  auto items = translated("textarith", 2000, 707);
  SimFamily family;  // defaults: a=0.35 b=-8 phi=0.7 psi=1
  std::vector<double> grid = {1e8, 1e9, 1e10, 1e11, 1e12};
  ScalingCurve curve = run_scaling(grid, family, items, 42, 200);
  DivergenceResult verdict = check_divergence(curve);

  double worst = 0;
  for (const auto& row : curve.rows) {
    double p = 1.0 / (1.0 + std::exp(-(family.a * std::log(row.scale) + family.b)));
    worst = std::max(worst, std::fabs(row.tos - (1.0 - family.phi) * p));
  }
  SimFamily control = family;
  control.phi = 1.0;
  ScalingCurve flat_curve = run_scaling(grid, control, items, 42, 200);
  DivergenceResult flat_verdict = check_divergence(flat_curve);

  bool pass = verdict.verdict == DivergenceVerdict::diverging && verdict.rho == 1.0 &&
              worst <= 0.03 && flat_verdict.verdict == DivergenceVerdict::flat;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "verdict=%s rho=%.3f max|tos-closed|=%.4f, phi=1 control=%s",
                verdict_name(verdict.verdict).c_str(), verdict.rho, worst,
                verdict_name(flat_verdict.verdict).c_str());
  report(7, "divergence-law", pass, detail, timer.seconds(), 120.0);
}

TEST_CASE("criterion 8: bootstrap determinism and coverage") {
  Timer timer;
  auto items = translated("barmax", 500, 808);
  auto index = std::make_shared<const ItemIndex>(make_item_index(items));

  MockSpec probe;
  probe.kind = MockSpec::Kind::blind_prior;
  probe.prior_acc = 0.25;
  probe.seed = 5;
  auto probe_client = make_mock_client(probe, index);
  RunOutput probe_run = run_protocol(items, *probe_client, RunOptions{});
  ConditionScores probe_scores = build_condition_scores(items, probe_run.transcripts);
  auto ci_a = bootstrap_ci(probe_scores, 1000, 99);
  auto ci_b = bootstrap_ci(probe_scores, 1000, 99);
  bool deterministic = true;
  for (const auto& [name, interval] : ci_a) {
    deterministic = deterministic && interval.lo == ci_b.at(name).lo &&
                    interval.hi == ci_b.at(name).hi;
  }

  int covered = 0;
  for (int run = 1; run <= 100; ++run) {
    MockSpec spec;
    spec.kind = MockSpec::Kind::blind_prior;
    spec.prior_acc = 0.25;
    spec.seed = 5000 + run;
    auto client = make_mock_client(spec, index);
    RunOutput out = run_protocol(items, *client, RunOptions{});
    ConditionScores scores = build_condition_scores(items, out.transcripts);
    Ci tos_ci = bootstrap_ci(scores, 1000, static_cast<std::uint64_t>(run)).at("tos");
    if (tos_ci.lo <= 0.75 && 0.75 <= tos_ci.hi) ++covered;
  }
  bool pass = deterministic && covered >= 90;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "identical intervals: %s; coverage %d/100 (need >=90)",
                deterministic ? "yes" : "no", covered);
  report(8, "bootstrap", pass, detail, timer.seconds(), 300.0);
}

TEST_CASE("criterion 9: audit engine batch equivalence and alarm latency") {
  Timer timer;

  // 9a: r=1 single window through the cli equals cmd_metrics field-for-field
  fs::path dir = scratch_root() / "c9";
  std::string raw = (dir / "raw").string();
  std::string ds = (dir / "ds").string();
  REQUIRE(run_cli("gen --task barmax --n 200 --seed 3001 --out " + raw) == 0);
  REQUIRE(run_cli("translate --in " + raw + "/items.jsonl --out " + ds) == 0);
  std::string model = "mock:lossy_encoder:epsilon=0.08,seed=5";
  REQUIRE(run_cli("audit --items " + ds + "/items.jsonl --model " + model +
                  " --rate 1.0 --window 200 --tau 0.05 --k 1 --seed 99 --bootstrap-b 200 "
                  "--out " + (dir / "events.jsonl").string()) == 0);
  REQUIRE(run_cli("run --items " + ds + "/items.jsonl --model " + model + " --out " +
                  (dir / "t.jsonl").string()) == 0);
  REQUIRE(run_cli("metrics --items " + ds + "/items.jsonl --transcripts " +
                  (dir / "t.jsonl").string() + " --out-json " + (dir / "r.json").string() +
                  " --bootstrap-b 200 --bootstrap-seed 99") == 0);
  json window_report;
  {
    std::ifstream events(dir / "events.jsonl");
    std::string line;
    REQUIRE(std::getline(events, line));
    window_report = json::parse(line)["report"];
  }
  json batch_report = read_json(dir / "r.json");
  bool equivalent = window_report == batch_report;

  // 9b: switch from the oracle to lossy_encoder(0.1) at stream item 5000;
  // alarm must land within 2000 stream items in >=95 of 100 seeded runs
  GeneratorSpec stream_spec;
  stream_spec.task_kind = "barmax";
  stream_spec.n = 10000;
  stream_spec.seed = 4001;
  auto stream = generate(stream_spec);  // untranslated; the engine translates on the fly
  auto index = std::make_shared<const ItemIndex>(make_item_index(stream));

  MockSpec oracle_spec;
  oracle_spec.kind = MockSpec::Kind::oracle;
  auto oracle = make_mock_client(oracle_spec, index);  // shared; answers are seed-free

  int on_time = 0, misdiagnosed = 0;
  for (int run = 1; run <= 100; ++run) {
    MockSpec lossy_spec;
    lossy_spec.kind = MockSpec::Kind::lossy_encoder;
    lossy_spec.epsilon = 0.1;
    lossy_spec.seed = 9000 + run;
    auto lossy = make_mock_client(lossy_spec, index);
    SwitchingClient client(*oracle, *lossy, 5000);

    AuditConfig cfg;
    cfg.sample_rate = 0.2;
    cfg.window = 200;
    cfg.tau = 0.05;
    cfg.consecutive_k = 2;
    cfg.seed = static_cast<std::uint64_t>(run);
    AuditEngine engine(cfg, client);
    int alarm_at = -1;
    Diagnosis alarm_diag = Diagnosis::indeterminate;
    for (int i = 0; i < 10000; ++i) {
      client.mark_item(i);
      if (auto alarm = engine.ingest(stream[i])) {
        alarm_at = i;
        alarm_diag = alarm->report.diagnosis;
        break;
      }
    }
    if (alarm_at >= 0 && alarm_at < 7000) {
      if (alarm_diag == Diagnosis::positive_collapse) {
        ++on_time;
      } else {
        ++misdiagnosed;
      }
    }
  }
  bool latency_ok = on_time >= 95;
  char detail[192];
  std::snprintf(detail, sizeof(detail),
                "batch-equivalence: %s; alarms within 2000 items: %d/100 "
                "(positive_collapse; %d mislabeled; need >=95)",
                equivalent ? "equal" : "DIFFERS", on_time, misdiagnosed);
  report(9, "audit-engine", equivalent && latency_ok, detail, timer.seconds(), 240.0);
  fs::remove_all(dir);
}

TEST_CASE("criterion 10: byte-identical artifacts across equal-seed reruns") {
  Timer timer;
  fs::path dir = scratch_root() / "c10";
  std::string a = (dir / "a").string();
  std::string b = (dir / "b").string();
  REQUIRE(run_cli("gen --task candlestick --n 40 --seed 555 --out " + a) == 0);
  REQUIRE(run_cli("gen --task candlestick --n 40 --seed 555 --out " + b) == 0);
  bool jsonl_equal = file_bytes(fs::path(a) / "items.jsonl") ==
                     file_bytes(fs::path(b) / "items.jsonl");
  bool png_equal = true;
  for (const auto& entry : fs::directory_iterator(fs::path(a) / "images")) {
    fs::path twin = fs::path(b) / "images" / entry.path().filename();
    if (!fs::exists(twin) || file_bytes(entry.path()) != file_bytes(twin)) {
      png_equal = false;
      break;
    }
  }

  std::string ds = (dir / "ds").string();
  REQUIRE(run_cli("translate --in " + a + "/items.jsonl --out " + ds) == 0);
  std::string model = "mock:blind_prior:prior_acc=0.3,seed=12";
  REQUIRE(run_cli("run --items " + ds + "/items.jsonl --model " + model + " --out " +
                  (dir / "t1.jsonl").string()) == 0);
  REQUIRE(run_cli("run --items " + ds + "/items.jsonl --model " + model + " --out " +
                  (dir / "t2.jsonl").string()) == 0);
  bool transcripts_equal =
      file_bytes(dir / "t1.jsonl") == file_bytes(dir / "t2.jsonl");

  bool pass = jsonl_equal && png_equal && transcripts_equal;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "items.jsonl: %s, images: %s, transcripts: %s",
                jsonl_equal ? "identical" : "DIFFER", png_equal ? "identical" : "DIFFER",
                transcripts_equal ? "identical" : "DIFFER");
  report(10, "artifact-determinism", pass, detail, timer.seconds(), 60.0);
  fs::remove_all(scratch_root());
}
