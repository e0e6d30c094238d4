#include "sscaudit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "sscaudit/errors.hpp"

namespace ssc {

using nlohmann::json;

RunOutput run_protocol(const std::vector<EvaluationItem>& items, ModelClient& client,
                       const RunOptions& options) {
  struct Task {
    const EvaluationItem* item;
    Condition condition;
  };
  std::vector<Task> tasks;
  tasks.reserve(items.size() * options.conditions.size());
  for (const auto& item : items) {
    for (Condition c : options.conditions) tasks.push_back({&item, c});
  }

  std::vector<Transcript> transcripts(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> failed{0};

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      Transcript t;
      t.item_id = task.item->id;
      t.condition = task.condition;
      t.model_id = client.model_id();
      try {
        PromptBundle bundle = make_prompt_bundle(*task.item, task.condition);
        t = client.answer(bundle);
      } catch (const std::exception& e) {
        t.raw_text.clear();
        t.error = e.what();
        failed.fetch_add(1);
      }
      transcripts[i] = std::move(t);
    }
  };

  int workers = std::max(1, std::min<int>(options.parallel, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  auto rank = [](Condition c) { return static_cast<int>(c); };
  std::sort(transcripts.begin(), transcripts.end(), [&](const Transcript& a, const Transcript& b) {
    if (a.item_id != b.item_id) return a.item_id < b.item_id;
    return rank(a.condition) < rank(b.condition);
  });
  return {std::move(transcripts), failed.load()};
}

void write_transcripts(const std::filesystem::path& path,
                       const std::vector<Transcript>& transcripts) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write: " + path.string());
  for (const auto& t : transcripts) {
    json j;
    j["item_id"] = t.item_id;
    j["condition"] = condition_name(t.condition);
    j["raw_text"] = t.raw_text;
    j["latency_ms"] = t.latency_ms;
    j["attempt_count"] = t.attempt_count;
    j["cache_hit"] = t.cache_hit;
    j["model_id"] = t.model_id;
    if (t.error) j["error"] = *t.error;
    out << j.dump() << "\n";
  }
}

std::vector<Transcript> load_transcripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path.string());
  std::vector<Transcript> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      Transcript t;
      t.item_id = j.at("item_id").get<std::string>();
      t.condition = parse_condition(j.at("condition").get<std::string>());
      t.raw_text = j.at("raw_text").get<std::string>();
      t.latency_ms = j.value("latency_ms", 0.0);
      t.attempt_count = j.value("attempt_count", 0);
      t.cache_hit = j.value("cache_hit", false);
      t.model_id = j.value("model_id", std::string{});
      if (j.contains("error") && !j["error"].is_null())
        t.error = j["error"].get<std::string>();
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ssc
