#pragma once

#include "cbde/engine.hpp"

#include <json.hpp>

#include <filesystem>

namespace cbde {

/// JSON layout of a RunReport:
///   config            engine configuration echo
///   n_features        N of the training data
///   provenance        string map (dataset path, content hash, run index, ...)
///   migrations        [{index, best_fitness, best_mask, best_popcount}]
///   final_population  [{key, mask, popcount, fitness, train_auc, test_auc,
///                       intercept, coefficients}]
///   lr_trainings      number of LR fits performed
///   timings           {total_seconds, migration_seconds, island_seconds}
/// Masks are hex bitstrings (see FeatureMask::to_hex).
nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EngineConfig& config);
EngineConfig engine_config_from_json(const nlohmann::json& j);

/// The report with its "timings" member removed; equal across thread counts.
nlohmann::json without_timings(nlohmann::json report);

void write_report(const RunReport& report, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

}  // namespace cbde
