#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sscaudit/item.hpp"

namespace ssc {

// On-disk dataset layout:
//   <dir>/items.jsonl          one item per line
//   <dir>/images/<id>_v.png    scene image
//   <dir>/images/<id>_t.png    rendered question (post-translation)
//   <dir>/images/<id>_symv.png composite (post-translation)
//
// JSONL fields: id, task_kind, v_path, v_label, t, t_img_path, symv_path,
// gold, choices, seed, meta. Image paths are relative to the jsonl file.
// Absent optionals are omitted, not null.

void write_dataset(const std::filesystem::path& dir, const std::vector<EvaluationItem>& items);

// Parses, loads referenced images, and validates (per-item invariants plus
// id uniqueness). Throws ValidationError with the offending line.
std::vector<EvaluationItem> load_dataset(const std::filesystem::path& jsonl_path);

// One line of items.jsonl -> item, resolving image paths against base_dir.
EvaluationItem parse_item_line(const std::string& line, const std::filesystem::path& base_dir);

std::string item_to_jsonl_line(const EvaluationItem& item);

// SHA-256 over the jsonl bytes followed by every referenced PNG's bytes in
// file order; the identity of a dataset for manifests and resumption.
std::string dataset_hash(const std::filesystem::path& jsonl_path);

}  // namespace ssc
