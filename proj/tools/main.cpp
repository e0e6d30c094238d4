// sscaudit: generate isomorphic datasets, run the translation protocol
// against a model back-end, and report the seeing-penalty metric suite.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sscaudit/audit.hpp"
#include "sscaudit/dataset.hpp"
#include "sscaudit/errors.hpp"
#include "sscaudit/http_client.hpp"
#include "sscaudit/metrics.hpp"
#include "sscaudit/model_client.hpp"
#include "sscaudit/runner.hpp"
#include "sscaudit/scaling.hpp"
#include "sscaudit/taskgen.hpp"
#include "sscaudit/translate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssc;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::map<std::string, double> parse_kv_params(const std::vector<std::string>& entries) {
  std::map<std::string, double> out;
  for (const auto& entry : entries) {
    std::stringstream ss(entry);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      std::size_t eq = pair.find('=');
      if (eq == std::string::npos) throw UsageError("expected key=value, got: " + pair);
      try {
        out[pair.substr(0, eq)] = std::stod(pair.substr(eq + 1));
      } catch (const std::exception&) {
        throw UsageError("numeric value expected in: " + pair);
      }
    }
  }
  return out;
}

std::vector<Condition> parse_conditions(const std::string& csv) {
  std::vector<Condition> out;
  std::stringstream ss(csv);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    try {
      out.push_back(parse_condition(name));
    } catch (const ValidationError&) {
      throw UsageError("unknown condition: " + name);
    }
  }
  if (out.empty()) throw UsageError("no conditions given");
  return out;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw UsageError("bad grid value: " + tok);
    }
  }
  return out;
}

struct ModelFlags {
  std::uint64_t seed = 1;
  std::string base_url;
  int max_tokens = 64;
  double timeout_sec = 60.0;
  std::string cache_dir;
  SimFamily sim;
  RenderConfig render;
};

// mock:NAME[:k=v,...] | sim:N | http:MODEL_ID
std::unique_ptr<ModelClient> resolve_model(const std::string& spec,
                                           std::shared_ptr<const ItemIndex> index,
                                           const ModelFlags& flags) {
  auto split_head = [&](const std::string& s) {
    std::size_t colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("bad model spec: " + spec);
    return std::pair<std::string, std::string>(s.substr(0, colon), s.substr(colon + 1));
  };
  auto [backend, rest] = split_head(spec);
  if (backend == "mock") {
    std::size_t colon = rest.find(':');
    std::string kind_name = colon == std::string::npos ? rest : rest.substr(0, colon);
    std::map<std::string, double> params;
    if (colon != std::string::npos) params = parse_kv_params({rest.substr(colon + 1)});
    MockSpec mock;
    mock.seed = flags.seed;
    if (kind_name == "oracle") {
      mock.kind = MockSpec::Kind::oracle;
    } else if (kind_name == "blind_prior") {
      mock.kind = MockSpec::Kind::blind_prior;
    } else if (kind_name == "lossy_encoder") {
      mock.kind = MockSpec::Kind::lossy_encoder;
    } else if (kind_name == "fusion_failure") {
      mock.kind = MockSpec::Kind::fusion_failure;
    } else {
      throw UsageError("unknown mock kind: " + kind_name);
    }
    for (const auto& [key, value] : params) {
      if (key == "prior_acc") mock.prior_acc = value;
      else if (key == "epsilon") mock.epsilon = value;
      else if (key == "delta") mock.delta = value;
      else if (key == "q") mock.q_single = value;
      else if (key == "seed") mock.seed = static_cast<std::uint64_t>(value);
      else throw UsageError("unknown mock parameter: " + key);
    }
    if (!index) throw UsageError("mock back-ends need a dataset");
    return make_mock_client(mock, std::move(index), flags.render);
  }
  if (backend == "sim") {
    double scale = 0;
    try {
      scale = std::stod(rest);
    } catch (const std::exception&) {
      throw UsageError("sim scale must be numeric: " + rest);
    }
    if (!index) throw UsageError("sim back-ends need a dataset");
    return make_scaled_sim(scale, flags.sim, flags.seed, std::move(index));
  }
  if (backend == "http") {
    HttpModelConfig cfg;
    cfg.base_url = flags.base_url;
    cfg.model = rest;
    if (const char* key = std::getenv("SSC_AUDIT_API_KEY")) cfg.api_key = key;
    cfg.max_tokens = flags.max_tokens;
    cfg.timeout_sec = flags.timeout_sec;
    cfg.cache_dir = flags.cache_dir;
    if (cfg.base_url.empty()) throw UsageError("http back-end requires --base-url");
    return make_http_client(cfg);
  }
  throw UsageError("unknown model back-end: " + backend);
}

class Manifest {
 public:
  Manifest(fs::path path, int argc, char** argv) : path_(std::move(path)) {
    for (int i = 0; i < argc; ++i) body_["command_line"].push_back(argv[i]);
    body_["tool_version"] = kToolVersion;
    body_["timestamps"]["started_unix"] = static_cast<std::int64_t>(std::time(nullptr));
    body_["timestamps"]["finished_unix"] = nullptr;
  }

  json& body() { return body_; }

  // first write happens before any work; finish() rewrites with the end time
  void write() const {
    fs::create_directories(path_.parent_path().empty() ? "." : path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    out << body_.dump(2) << "\n";
  }
  void finish() {
    body_["timestamps"]["finished_unix"] = static_cast<std::int64_t>(std::time(nullptr));
    write();
  }

 private:
  fs::path path_;
  json body_;
};

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
}

template <typename T>
void merge_config(const CLI::Option* opt, T& value, const json& cfg, const char* key) {
  if (opt->count() == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write: " + path.string());
  out << text;
}

json audit_event_to_json(const AuditEvent& e) {
  json j;
  j["event_type"] = e.type == AuditEvent::Type::alarm ? "alarm" : "window";
  j["window_index"] = e.window_index;
  j["first_item_id"] = e.first_item_id;
  j["last_item_id"] = e.last_item_id;
  j["report"] = report_to_json(e.report);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modality translation audit harness"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config merged under explicit flags");

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate an isomorphic dataset");
  std::string gen_task, gen_out;
  int gen_n = 100;
  std::uint64_t gen_seed = 1;
  std::vector<std::string> gen_params;
  auto* gen_task_opt = gen->add_option("--task", gen_task, "candlestick | barmax | textarith")
                           ->required();
  auto* gen_n_opt = gen->add_option("--n", gen_n, "item count");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output dataset directory")->required();
  gen->add_option("--param", gen_params, "task parameter overrides, k=v[,k=v...]");

  // ---- translate ----
  auto* translate = app.add_subcommand("translate", "fill t_img and the symv composite");
  std::string tr_in, tr_out;
  RenderConfig tr_cfg;
  translate->add_option("--in", tr_in, "items.jsonl to translate")->required();
  translate->add_option("--out", tr_out, "output dataset directory")->required();
  auto* tr_scale_opt = translate->add_option("--scale", tr_cfg.glyph_scale, "glyph scale");
  auto* tr_wrap_opt = translate->add_option("--wrap", tr_cfg.wrap_columns, "wrap columns");
  auto* tr_margin_opt = translate->add_option("--margin", tr_cfg.margin_px, "margin pixels");

  // ---- run ----
  auto* run = app.add_subcommand("run", "evaluate a model under the protocol conditions");
  std::string run_items, run_model, run_conditions = "full,symt,symv", run_out;
  ModelFlags run_flags;
  int run_parallel = 4;
  run->add_option("--items", run_items, "translated items.jsonl")->required();
  auto* run_model_opt = run->add_option("--model", run_model,
                                        "mock:NAME[:k=v,...] | sim:N | http:MODEL_ID")
                            ->required();
  auto* run_cond_opt = run->add_option("--conditions", run_conditions, "comma-separated");
  run->add_option("--out", run_out, "transcripts.jsonl")->required();
  auto* run_seed_opt = run->add_option("--seed", run_flags.seed, "model seed");
  auto* run_par_opt = run->add_option("--parallel", run_parallel, "in-flight model calls");
  run->add_option("--base-url", run_flags.base_url, "http back-end base url");
  run->add_option("--max-tokens", run_flags.max_tokens, "completion budget");
  run->add_option("--timeout", run_flags.timeout_sec, "http timeout seconds");
  run->add_option("--cache-dir", run_flags.cache_dir, "response cache directory");
  run->add_option("--sim-a", run_flags.sim.a, "sim family a");
  run->add_option("--sim-b", run_flags.sim.b, "sim family b");
  run->add_option("--sim-phi", run_flags.sim.phi, "sim family phi");
  run->add_option("--sim-psi", run_flags.sim.psi, "sim family psi");
  run->add_option("--scale", run_flags.render.glyph_scale,
                  "glyph scale the dataset was translated with");
  run->add_option("--wrap", run_flags.render.wrap_columns, "translation wrap columns");
  run->add_option("--margin", run_flags.render.margin_px, "translation margin pixels");

  // ---- metrics ----
  auto* metrics = app.add_subcommand("metrics", "score transcripts and compute the metric suite");
  std::string me_items, me_transcripts, me_out_json, me_out_md;
  int me_b = 1000;
  std::uint64_t me_seed = 17;
  metrics->add_option("--items", me_items, "items.jsonl")->required();
  metrics->add_option("--transcripts", me_transcripts, "transcripts.jsonl")->required();
  metrics->add_option("--out-json", me_out_json, "report.json")->required();
  metrics->add_option("--out-md", me_out_md, "report.md");
  auto* me_b_opt = metrics->add_option("--bootstrap-b", me_b, "bootstrap replicates");
  auto* me_seed_opt = metrics->add_option("--bootstrap-seed", me_seed, "bootstrap seed");

  // ---- baseline ----
  auto* baseline = app.add_subcommand(
      "baseline", "legacy MG/ML pipeline: vlm under full/symt/symv/textonly + base model");
  std::string bl_items, bl_model, bl_base_model, bl_out_json, bl_out_md;
  ModelFlags bl_flags;
  std::uint64_t bl_base_seed = 2;
  int bl_b = 1000;
  std::uint64_t bl_boot_seed = 17;
  int bl_parallel = 4;
  baseline->add_option("--items", bl_items, "translated items.jsonl")->required();
  baseline->add_option("--model", bl_model, "the VLM under test")->required();
  baseline->add_option("--base-model", bl_base_model, "its base LLM (for basetext)")
      ->required();
  baseline->add_option("--out-json", bl_out_json, "report.json")->required();
  baseline->add_option("--out-md", bl_out_md, "report.md");
  baseline->add_option("--seed", bl_flags.seed, "vlm model seed");
  baseline->add_option("--base-seed", bl_base_seed, "base model seed");
  baseline->add_option("--bootstrap-b", bl_b, "bootstrap replicates");
  baseline->add_option("--bootstrap-seed", bl_boot_seed, "bootstrap seed");
  baseline->add_option("--parallel", bl_parallel, "in-flight model calls");
  baseline->add_option("--base-url", bl_flags.base_url, "http back-end base url");
  baseline->add_option("--cache-dir", bl_flags.cache_dir, "response cache directory");
  baseline->add_option("--scale", bl_flags.render.glyph_scale,
                       "glyph scale the dataset was translated with");
  baseline->add_option("--wrap", bl_flags.render.wrap_columns, "translation wrap columns");
  baseline->add_option("--margin", bl_flags.render.margin_px, "translation margin pixels");

  // ---- scaling ----
  auto* scaling = app.add_subcommand("scaling", "divergence-law sweep over the simulated family");
  std::string sc_items, sc_grid = "1e8,1e9,1e10,1e11,1e12", sc_out_csv;
  SimFamily sc_family;
  std::uint64_t sc_seed = 42;
  int sc_b = 200;
  scaling->add_option("--items", sc_items, "translated items.jsonl")->required();
  auto* sc_grid_opt = scaling->add_option("--grid", sc_grid, "comma-separated scales");
  scaling->add_option("--out-csv", sc_out_csv, "curve CSV")->required();
  auto* sc_a_opt = scaling->add_option("--a", sc_family.a, "logistic slope");
  auto* sc_b_opt = scaling->add_option("--b", sc_family.b, "logistic intercept");
  auto* sc_phi_opt = scaling->add_option("--phi", sc_family.phi, "visual-pathway efficiency");
  auto* sc_psi_opt = scaling->add_option("--psi", sc_family.psi, "integration efficiency");
  auto* sc_seed_opt = scaling->add_option("--seed", sc_seed, "sweep seed");
  scaling->add_option("--bootstrap-b", sc_b, "bootstrap replicates per point");

  // ---- audit ----
  auto* audit = app.add_subcommand("audit", "streaming window monitor with ssc alarms");
  std::string au_items, au_model, au_out;
  AuditConfig au_cfg;
  ModelFlags au_flags;
  audit->add_option("--items", au_items, "item stream jsonl, or - for stdin")->required();
  audit->add_option("--model", au_model, "model back-end")->required();
  audit->add_option("--out", au_out, "events.jsonl")->required();
  auto* au_rate_opt = audit->add_option("--rate", au_cfg.sample_rate, "sample rate (0,1]");
  auto* au_window_opt = audit->add_option("--window", au_cfg.window, "sampled items per window");
  auto* au_tau_opt = audit->add_option("--tau", au_cfg.tau, "ssc alarm threshold");
  auto* au_k_opt = audit->add_option("--k", au_cfg.consecutive_k, "consecutive windows to alarm");
  auto* au_seed_opt = audit->add_option("--seed", au_cfg.seed, "audit seed");
  audit->add_option("--bootstrap-b", au_cfg.bootstrap_b, "bootstrap replicates per window");
  audit->add_option("--base-url", au_flags.base_url, "http back-end base url");
  audit->add_option("--cache-dir", au_flags.cache_dir, "response cache directory");
  audit->add_option("--scale", au_cfg.render.glyph_scale, "on-the-fly translation glyph scale");
  audit->add_option("--wrap", au_cfg.render.wrap_columns, "on-the-fly translation wrap columns");
  audit->add_option("--margin", au_cfg.render.margin_px, "on-the-fly translation margin pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    json cfg = load_config_file(config_path);

    if (gen->parsed()) {
      merge_config(gen_n_opt, gen_n, cfg, "n");
      merge_config(gen_seed_opt, gen_seed, cfg, "seed");
      merge_config(gen_task_opt, gen_task, cfg, "task");
      GeneratorSpec spec;
      spec.task_kind = gen_task;
      spec.n = gen_n;
      spec.seed = gen_seed;
      spec.params = parse_kv_params(gen_params);
      if (cfg.contains("params"))
        for (auto& [k, v] : cfg.at("params").items())
          if (!spec.params.count(k)) spec.params[k] = v.get<double>();

      Manifest manifest(fs::path(gen_out) / "manifest.json", argc, argv);
      manifest.body()["config"] = {{"task", spec.task_kind}, {"n", spec.n}, {"seed", spec.seed}};
      fs::create_directories(gen_out);
      manifest.write();
      auto items = generate(spec);
      write_dataset(gen_out, items);
      std::string hash = dataset_hash(fs::path(gen_out) / "items.jsonl");
      manifest.body()["dataset_hash"] = hash;
      manifest.finish();
      std::cout << hash << "\n";
      return 0;
    }

    if (translate->parsed()) {
      merge_config(tr_scale_opt, tr_cfg.glyph_scale, cfg, "scale");
      merge_config(tr_wrap_opt, tr_cfg.wrap_columns, cfg, "wrap");
      merge_config(tr_margin_opt, tr_cfg.margin_px, cfg, "margin");
      Manifest manifest(fs::path(tr_out) / "manifest.json", argc, argv);
      manifest.body()["config"] = {{"scale", tr_cfg.glyph_scale},
                                   {"wrap", tr_cfg.wrap_columns},
                                   {"margin", tr_cfg.margin_px}};
      fs::create_directories(tr_out);
      manifest.write();
      auto items = load_dataset(tr_in);
      std::vector<EvaluationItem> translated;
      translated.reserve(items.size());
      for (const auto& item : items) translated.push_back(translate_item(item, tr_cfg));
      write_dataset(tr_out, translated);
      std::string hash = dataset_hash(fs::path(tr_out) / "items.jsonl");
      manifest.body()["dataset_hash"] = hash;
      manifest.finish();
      std::cout << hash << "\n";
      return 0;
    }

    if (run->parsed()) {
      merge_config(run_seed_opt, run_flags.seed, cfg, "seed");
      merge_config(run_cond_opt, run_conditions, cfg, "conditions");
      merge_config(run_par_opt, run_parallel, cfg, "parallel");
      merge_config(run_model_opt, run_model, cfg, "model");
      auto items = load_dataset(run_items);
      auto index = std::make_shared<const ItemIndex>(make_item_index(items));
      auto client = resolve_model(run_model, index, run_flags);

      Manifest manifest(run_out + ".manifest.json", argc, argv);
      manifest.body()["config"] = {{"model", run_model},
                                   {"conditions", run_conditions},
                                   {"seed", run_flags.seed},
                                   {"parallel", run_parallel}};
      manifest.body()["dataset_hash"] = dataset_hash(run_items);
      manifest.body()["model_ids"] = {client->model_id()};
      manifest.write();

      RunOptions options;
      options.conditions = parse_conditions(run_conditions);
      options.parallel = run_parallel;
      RunOutput out = run_protocol(items, *client, options);
      write_transcripts(run_out, out.transcripts);
      manifest.body()["failed_pairs"] = out.failed;
      manifest.finish();
      std::cerr << "wrote " << out.transcripts.size() << " transcripts, " << out.failed
                << " failed\n";
      if (out.failed == 0) return 0;
      // every pair failing means the transport never worked at all
      return out.failed == static_cast<int>(out.transcripts.size()) ? 4 : 5;
    }

    if (metrics->parsed()) {
      merge_config(me_b_opt, me_b, cfg, "bootstrap_b");
      merge_config(me_seed_opt, me_seed, cfg, "bootstrap_seed");
      auto items = load_dataset(me_items);
      auto transcripts = load_transcripts(me_transcripts);
      ConditionScores scores = build_condition_scores(items, transcripts);
      MetricReport report = analyze_scores(scores, me_b, me_seed);

      Manifest manifest(me_out_json + ".manifest.json", argc, argv);
      manifest.body()["config"] = {{"bootstrap_b", me_b}, {"bootstrap_seed", me_seed}};
      manifest.body()["dataset_hash"] = dataset_hash(me_items);
      manifest.write();
      json j = report_to_json(report);
      write_text(me_out_json, j.dump(2) + "\n");
      if (!me_out_md.empty()) write_text(me_out_md, report_to_markdown(report));
      manifest.finish();
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (baseline->parsed()) {
      auto items = load_dataset(bl_items);
      auto index = std::make_shared<const ItemIndex>(make_item_index(items));
      auto vlm = resolve_model(bl_model, index, bl_flags);
      ModelFlags base_flags = bl_flags;
      base_flags.seed = bl_base_seed;
      auto base = resolve_model(bl_base_model, index, base_flags);

      Manifest manifest(bl_out_json + ".manifest.json", argc, argv);
      manifest.body()["config"] = {{"model", bl_model},
                                   {"base_model", bl_base_model},
                                   {"seed", bl_flags.seed},
                                   {"base_seed", bl_base_seed}};
      manifest.body()["dataset_hash"] = dataset_hash(bl_items);
      manifest.body()["model_ids"] = {vlm->model_id(), base->model_id()};
      manifest.write();

      RunOptions vlm_options;
      vlm_options.conditions = {Condition::Full, Condition::SymT, Condition::SymV,
                                Condition::TextOnly};
      vlm_options.parallel = bl_parallel;
      RunOutput vlm_run = run_protocol(items, *vlm, vlm_options);
      RunOptions base_options;
      base_options.conditions = {Condition::BaseText};
      base_options.parallel = bl_parallel;
      RunOutput base_run = run_protocol(items, *base, base_options);

      std::vector<Transcript> all = vlm_run.transcripts;
      all.insert(all.end(), base_run.transcripts.begin(), base_run.transcripts.end());
      ConditionScores scores = build_condition_scores(items, all);
      MetricReport report = analyze_scores(scores, bl_b, bl_boot_seed);
      json j = report_to_json(report);
      write_text(bl_out_json, j.dump(2) + "\n");
      if (!bl_out_md.empty()) write_text(bl_out_md, report_to_markdown(report));
      manifest.finish();
      std::cout << j.dump() << "\n";
      return (vlm_run.failed + base_run.failed) > 0 ? 5 : 0;
    }

    if (scaling->parsed()) {
      merge_config(sc_grid_opt, sc_grid, cfg, "grid");
      merge_config(sc_a_opt, sc_family.a, cfg, "a");
      merge_config(sc_b_opt, sc_family.b, cfg, "b");
      merge_config(sc_phi_opt, sc_family.phi, cfg, "phi");
      merge_config(sc_psi_opt, sc_family.psi, cfg, "psi");
      merge_config(sc_seed_opt, sc_seed, cfg, "seed");
      auto items = load_dataset(sc_items);

      Manifest manifest(sc_out_csv + ".manifest.json", argc, argv);
      manifest.body()["config"] = {{"grid", sc_grid}, {"a", sc_family.a}, {"b", sc_family.b},
                                   {"phi", sc_family.phi}, {"psi", sc_family.psi},
                                   {"seed", sc_seed}};
      manifest.body()["dataset_hash"] = dataset_hash(sc_items);
      manifest.write();

      ScalingCurve curve = run_scaling(parse_grid(sc_grid), sc_family, items, sc_seed, sc_b);
      write_text(sc_out_csv, curve_to_csv(curve));
      DivergenceResult verdict = check_divergence(curve);
      json j;
      j["verdict"] = verdict_name(verdict.verdict);
      j["rho"] = verdict.rho;
      j["tos_range"] = verdict.range;
      j["pooled_ci_halfwidth"] = verdict.pooled_halfwidth;
      j["thresholds"] = {{"rho", 0.9}, {"separation", 2.0 * verdict.pooled_halfwidth}};
      manifest.body()["verdict"] = j;
      manifest.finish();
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (audit->parsed()) {
      merge_config(au_rate_opt, au_cfg.sample_rate, cfg, "rate");
      merge_config(au_window_opt, au_cfg.window, cfg, "window");
      merge_config(au_tau_opt, au_cfg.tau, cfg, "tau");
      merge_config(au_k_opt, au_cfg.consecutive_k, cfg, "k");
      merge_config(au_seed_opt, au_cfg.seed, cfg, "seed");

      bool from_stdin = au_items == "-";
      fs::path base_dir = from_stdin ? fs::current_path() : fs::path(au_items).parent_path();

      // the audit model needs an index; stream items are added as they arrive
      auto index = std::make_shared<ItemIndex>();
      auto read_only_index = std::shared_ptr<const ItemIndex>(index);
      ModelFlags flags = au_flags;
      flags.render = au_cfg.render;
      auto client = resolve_model(au_model, read_only_index, flags);

      Manifest manifest(au_out + ".manifest.json", argc, argv);
      manifest.body()["config"] = {{"rate", au_cfg.sample_rate}, {"window", au_cfg.window},
                                   {"tau", au_cfg.tau}, {"k", au_cfg.consecutive_k},
                                   {"seed", au_cfg.seed}, {"bootstrap_b", au_cfg.bootstrap_b}};
      manifest.body()["model_ids"] = {client->model_id()};
      manifest.write();

      AuditEngine engine(au_cfg, *client);
      std::ofstream events_out(au_out, std::ios::binary | std::ios::trunc);
      if (!events_out) throw ValidationError("cannot write: " + au_out);

      std::ifstream file_in;
      std::istream* in = &std::cin;
      if (!from_stdin) {
        file_in.open(au_items);
        if (!file_in) throw ValidationError("cannot open: " + au_items);
        in = &file_in;
      }
      std::string line;
      std::size_t emitted = 0;
      int alarms = 0;
      while (std::getline(*in, line)) {
        if (line.empty()) continue;
        EvaluationItem item = parse_item_line(line, base_dir);
        index->emplace(item.id, item);
        engine.ingest(item);
        for (; emitted < engine.events().size(); ++emitted) {
          const AuditEvent& e = engine.events()[emitted];
          if (e.type == AuditEvent::Type::alarm) ++alarms;
          events_out << audit_event_to_json(e).dump() << "\n";
        }
      }
      manifest.body()["alarms"] = alarms;
      manifest.finish();
      std::cerr << "audited " << engine.stream_position() << " items, " << alarms
                << " alarms\n";
      return 0;
    }

    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownTaskKind& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidParams& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return 4;
  } catch (const MalformedResponse& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
