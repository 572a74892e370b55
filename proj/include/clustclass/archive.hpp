#pragma once

#include "clustclass/jcc.hpp"
#include "clustclass/pipeline.hpp"

#include <filesystem>
#include <string>

namespace clustclass {

inline constexpr int kArchiveSchemaVersion = 1;

// JSON document with an explicit schema_version. Reals are written in
// shortest round-trip form, so a loaded model predicts bit-identically.
std::string archive_to_json(const ModelArchive& m);
ModelArchive archive_from_json(const std::string& text);
void save_archive(const ModelArchive& m, const std::filesystem::path& path);
ModelArchive load_archive(const std::filesystem::path& path);

// {"positives": [[...]], "negatives": [[...]], "L": 2, "lambda_plus": 1,
//  "lambda_minus": 1, "T": 1.5 | "inf", "cluster_budgets": [...],
//  "intra_weight": 0}
std::string jcc_instance_to_json(const JccInstance& inst);
JccInstance jcc_instance_from_json(const std::string& text);
JccInstance load_jcc_instance(const std::filesystem::path& path);

}  // namespace clustclass
