#include "sscaudit/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sscaudit/errors.hpp"
#include "sscaudit/sha256.hpp"

namespace ssc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string image_rel_path(const EvaluationItem& item, const char* suffix) {
  return "images/" + item.id + "_" + suffix + ".png";
}

std::string read_file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot open: " + p.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

std::string item_to_jsonl_line(const EvaluationItem& item) {
  json j;
  j["id"] = item.id;
  j["task_kind"] = item.task_kind;
  if (item.v) j["v_path"] = image_rel_path(item, "v");
  j["v_label"] = item.v_label;
  j["t"] = item.t;
  if (item.t_img) j["t_img_path"] = image_rel_path(item, "t");
  if (item.symv_composite) j["symv_path"] = image_rel_path(item, "symv");
  j["gold"] = item.gold;
  if (item.choices) j["choices"] = *item.choices;
  j["seed"] = item.seed;
  j["meta"] = item.meta;
  return j.dump();
}

void write_dataset(const fs::path& dir, const std::vector<EvaluationItem>& items) {
  fs::create_directories(dir / "images");
  std::ofstream out(dir / "items.jsonl", std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write: " + (dir / "items.jsonl").string());
  std::set<std::string> seen;
  for (const auto& item : items) {
    auto violations = validate_item(item);
    if (!violations.empty()) {
      throw ValidationError("item " + item.id + " violates " + violations.front().field + ":" +
                            violations.front().rule);
    }
    if (!seen.insert(item.id).second)
      throw ValidationError("duplicate item id: " + item.id);
    if (item.v) save_png(dir / image_rel_path(item, "v"), *item.v);
    if (item.t_img) save_png(dir / image_rel_path(item, "t"), *item.t_img);
    if (item.symv_composite) save_png(dir / image_rel_path(item, "symv"), *item.symv_composite);
    out << item_to_jsonl_line(item) << "\n";
  }
}

EvaluationItem parse_item_line(const std::string& line, const fs::path& base_dir) {
  json j = json::parse(line);
  EvaluationItem item;
  item.id = j.at("id").get<std::string>();
  item.task_kind = j.at("task_kind").get<std::string>();
  item.v_label = j.at("v_label").get<std::string>();
  item.t = j.at("t").get<std::string>();
  item.gold = j.at("gold").get<std::string>();
  item.seed = j.value("seed", std::int64_t{0});
  if (j.contains("choices") && !j["choices"].is_null())
    item.choices = j["choices"].get<std::vector<std::string>>();
  if (j.contains("meta") && !j["meta"].is_null())
    item.meta = j["meta"].get<std::map<std::string, double>>();
  auto load = [&](const char* key) -> std::shared_ptr<const Image> {
    if (!j.contains(key) || j[key].is_null()) return nullptr;
    return std::make_shared<const Image>(load_png(base_dir / j[key].get<std::string>()));
  };
  item.v = load("v_path");
  item.t_img = load("t_img_path");
  item.symv_composite = load("symv_path");
  return item;
}

std::vector<EvaluationItem> load_dataset(const fs::path& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw ValidationError("cannot open: " + jsonl_path.string());
  fs::path base = jsonl_path.parent_path();
  std::vector<EvaluationItem> items;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    EvaluationItem item;
    try {
      item = parse_item_line(line, base);
    } catch (const json::exception& e) {
      throw ValidationError(jsonl_path.string() + ":" + std::to_string(line_no) + ": " +
                            e.what());
    }
    auto violations = validate_item(item);
    if (!violations.empty()) {
      throw ValidationError(jsonl_path.string() + ":" + std::to_string(line_no) + ": field " +
                            violations.front().field + " violates " + violations.front().rule);
    }
    if (!seen.insert(item.id).second) {
      throw ValidationError(jsonl_path.string() + ":" + std::to_string(line_no) +
                            ": duplicate id " + item.id);
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::string dataset_hash(const fs::path& jsonl_path) {
  Sha256 hasher;
  std::string jsonl = read_file_bytes(jsonl_path);
  hasher.update(jsonl);
  fs::path base = jsonl_path.parent_path();
  std::istringstream lines(jsonl);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    for (const char* key : {"v_path", "t_img_path", "symv_path"}) {
      if (j.contains(key) && !j[key].is_null()) {
        hasher.update(read_file_bytes(base / j[key].get<std::string>()));
      }
    }
  }
  return hasher.hex_digest();
}

}  // namespace ssc
