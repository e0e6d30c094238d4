#pragma once

#include <filesystem>
#include <vector>

#include "sscaudit/item.hpp"
#include "sscaudit/model_client.hpp"

namespace ssc {

struct RunOptions {
  std::vector<Condition> conditions{Condition::Full, Condition::SymT, Condition::SymV};
  int parallel = 4;  // in-flight model calls
};

struct RunOutput {
  std::vector<Transcript> transcripts;  // sorted by (item_id, condition)
  int failed = 0;                       // permanently failed (item, condition) pairs
};

// One transcript per (item, condition). Model errors are caught per pair and
// recorded on the transcript rather than dropped, so paired comparisons stay
// paired. Output order is independent of worker scheduling.
RunOutput run_protocol(const std::vector<EvaluationItem>& items, ModelClient& client,
                       const RunOptions& options);

void write_transcripts(const std::filesystem::path& path,
                       const std::vector<Transcript>& transcripts);
std::vector<Transcript> load_transcripts(const std::filesystem::path& path);

}  // namespace ssc
