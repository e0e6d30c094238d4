#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sscaudit/dataset.hpp"
#include "sscaudit/errors.hpp"
#include "sscaudit/model_client.hpp"
#include "sscaudit/runner.hpp"
#include "sscaudit/scoring.hpp"
#include "sscaudit/taskgen.hpp"
#include "sscaudit/translate.hpp"

using namespace ssc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("sscaudit-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<EvaluationItem> small_dataset() {
  GeneratorSpec spec;
  spec.task_kind = "barmax";
  spec.n = 12;
  spec.seed = 4;
  auto items = generate(spec);
  for (auto& item : items) item = translate_item(item, RenderConfig{});
  return items;
}

}  // namespace

TEST_CASE("dataset write/load round trip preserves items and field names") {
  fs::path dir = scratch_dir("dataset");
  auto items = small_dataset();
  write_dataset(dir, items);

  std::ifstream in(dir / "items.jsonl");
  std::string line;
  REQUIRE(std::getline(in, line));
  auto j = nlohmann::json::parse(line);
  for (const char* key : {"id", "task_kind", "v_path", "v_label", "t", "t_img_path",
                          "symv_path", "gold", "choices", "seed", "meta"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }

  auto loaded = load_dataset(dir / "items.jsonl");
  REQUIRE(loaded.size() == items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    CHECK(loaded[i].id == items[i].id);
    CHECK(loaded[i].v_label == items[i].v_label);
    CHECK(loaded[i].gold == items[i].gold);
    CHECK(loaded[i].seed == items[i].seed);
    CHECK(loaded[i].meta == items[i].meta);
    CHECK(*loaded[i].v == *items[i].v);
    CHECK(*loaded[i].t_img == *items[i].t_img);
    CHECK(*loaded[i].symv_composite == *items[i].symv_composite);
  }
  fs::remove_all(dir);
}

TEST_CASE("untranslated items omit the derived image fields") {
  fs::path dir = scratch_dir("dataset-raw");
  GeneratorSpec spec;
  spec.task_kind = "textarith";
  spec.n = 3;
  spec.seed = 2;
  write_dataset(dir, generate(spec));
  std::ifstream in(dir / "items.jsonl");
  std::string line;
  REQUIRE(std::getline(in, line));
  auto j = nlohmann::json::parse(line);
  CHECK(!j.contains("t_img_path"));
  CHECK(!j.contains("symv_path"));
  CHECK(!j.contains("choices"));
  fs::remove_all(dir);
}

TEST_CASE("duplicate ids are rejected at load") {
  fs::path dir = scratch_dir("dataset-dup");
  auto items = small_dataset();
  items[1].id = items[0].id;
  CHECK_THROWS_AS(write_dataset(dir, items), ValidationError);
  // craft the duplicate on disk directly
  auto ok = small_dataset();
  write_dataset(dir, ok);
  std::ifstream in(dir / "items.jsonl");
  std::string first;
  std::getline(in, first);
  in.close();
  std::ofstream out(dir / "items.jsonl", std::ios::app);
  out << first << "\n";
  out.close();
  CHECK_THROWS_AS(load_dataset(dir / "items.jsonl"), ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("dataset hash is stable and sensitive to content") {
  fs::path dir = scratch_dir("dataset-hash");
  auto items = small_dataset();
  write_dataset(dir, items);
  std::string h1 = dataset_hash(dir / "items.jsonl");
  std::string h2 = dataset_hash(dir / "items.jsonl");
  CHECK(h1 == h2);
  items[0].gold = items[0].gold == "A" ? "B" : "A";
  items[0].choices = std::vector<std::string>{"A", "B"};
  write_dataset(dir, items);
  CHECK(dataset_hash(dir / "items.jsonl") != h1);
  fs::remove_all(dir);
}

TEST_CASE("run_protocol output is sorted and scheduling-independent") {
  auto items = small_dataset();
  auto index = std::make_shared<const ItemIndex>(make_item_index(items));
  MockSpec spec;
  spec.kind = MockSpec::Kind::blind_prior;
  spec.prior_acc = 0.5;
  spec.seed = 6;
  auto client = make_mock_client(spec, index);

  RunOptions serial;
  serial.parallel = 1;
  RunOptions wide;
  wide.parallel = 8;
  RunOutput a = run_protocol(items, *client, serial);
  RunOutput b = run_protocol(items, *client, wide);
  REQUIRE(a.transcripts.size() == b.transcripts.size());
  for (std::size_t i = 0; i < a.transcripts.size(); ++i) {
    CHECK(a.transcripts[i].item_id == b.transcripts[i].item_id);
    CHECK(a.transcripts[i].condition == b.transcripts[i].condition);
    CHECK(a.transcripts[i].raw_text == b.transcripts[i].raw_text);
  }
  for (std::size_t i = 1; i < a.transcripts.size(); ++i) {
    const auto& prev = a.transcripts[i - 1];
    const auto& cur = a.transcripts[i];
    bool ordered = prev.item_id < cur.item_id ||
                   (prev.item_id == cur.item_id &&
                    static_cast<int>(prev.condition) < static_cast<int>(cur.condition));
    CHECK(ordered);
  }
}

TEST_CASE("errored transcripts score zero and are flagged, not dropped") {
  auto items = small_dataset();
  auto index = std::make_shared<const ItemIndex>(make_item_index(items));
  MockSpec spec;
  spec.kind = MockSpec::Kind::oracle;
  auto client = make_mock_client(spec, index);
  RunOutput out = run_protocol(items, *client, RunOptions{});
  // simulate one permanently failed pair
  out.transcripts[4].raw_text.clear();
  out.transcripts[4].error = "transport exhausted";
  ConditionScores scores = build_condition_scores(items, out.transcripts);
  CHECK(scores.n_failed == 1);
  int total = 0;
  for (Condition c : kProtocolConditions) {
    for (int s : scores.scores.at(c)) total += s;
  }
  CHECK(total == scores.n() * 3 - 1);  // exactly the failed pair lost its point
}

TEST_CASE("unpaired transcripts are rejected") {
  auto items = small_dataset();
  auto index = std::make_shared<const ItemIndex>(make_item_index(items));
  MockSpec spec;
  spec.kind = MockSpec::Kind::oracle;
  auto client = make_mock_client(spec, index);
  RunOutput out = run_protocol(items, *client, RunOptions{});
  out.transcripts.pop_back();  // one condition now misses one item
  CHECK_THROWS_AS(build_condition_scores(items, out.transcripts), ValidationError);
}

TEST_CASE("transcript jsonl round trip") {
  fs::path dir = scratch_dir("transcripts");
  auto items = small_dataset();
  auto index = std::make_shared<const ItemIndex>(make_item_index(items));
  MockSpec spec;
  spec.kind = MockSpec::Kind::oracle;
  auto client = make_mock_client(spec, index);
  RunOutput out = run_protocol(items, *client, RunOptions{});
  fs::path path = dir / "t.jsonl";
  write_transcripts(path, out.transcripts);
  auto loaded = load_transcripts(path);
  REQUIRE(loaded.size() == out.transcripts.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].item_id == out.transcripts[i].item_id);
    CHECK(loaded[i].condition == out.transcripts[i].condition);
    CHECK(loaded[i].raw_text == out.transcripts[i].raw_text);
    CHECK(loaded[i].model_id == out.transcripts[i].model_id);
  }
  fs::remove_all(dir);
}
