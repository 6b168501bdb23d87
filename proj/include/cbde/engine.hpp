#pragma once

#include "cbde/classifier.hpp"
#include "cbde/dataset.hpp"
#include "cbde/evolution.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbde {

enum class Variant { BDE, CBDE_LM, CBDE_TM };

std::string_view to_string(Variant v) noexcept;  // "bde", "cbde-lm", "cbde-tm"
Variant parse_variant(std::string_view name);

struct EngineConfig {
  std::size_t ps = 50;
  std::size_t lps = 10;
  std::size_t k_islands = 4;
  int mMig = 5;
  int mGen = 10;
  double mf = 0.2;
  double cr = 0.9;
  Variant variant = Variant::BDE;
  std::uint64_t master_seed = 0;
  std::size_t threads = 0;  // 0 = hardware concurrency
  double lw = 4.0;
  double tw = 1.5;
  Binarization binarization = Binarization::Threshold;
  TrainConfig lr;
  bool dedup = false;                  // drop repeated masks at migration
  bool retrain_on_full_train = false;  // refit survivors on all of train before test scoring
  bool keep_snapshots = false;         // store the global population in every MigrationRecord

  /// Throws ConfigError naming the first offending field.
  void validate() const;
  OperatorParams operator_params() const;  // chaos state left empty
  std::optional<ChaosMap> chaos_map() const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

struct MigrationRecord {
  int migration_index = 0;
  double best_fitness = 0.0;
  FeatureMask best_mask;
  std::optional<Population> population_snapshot;
};

struct KeyedAuc {
  std::uint64_t key = 0;
  double auc = 0.0;
};

struct Timings {
  double total_seconds = 0.0;
  std::vector<double> migration_seconds;            // per round, includes the barrier
  std::vector<std::vector<double>> island_seconds;  // [round][island]
};

struct RunReport {
  EngineConfig config;
  std::size_t n_features = 0;
  Population final_population;
  std::vector<KeyedAuc> test_aucs;  // population order
  std::vector<MigrationRecord> migrations;
  std::size_t lr_trainings = 0;
  Timings timings;
  std::map<std::string, std::string> provenance;  // dataset identity, run index; filled in by callers
  std::map<std::string, std::string> experiment;  // flat config echo that reproduces the run

  /// Member that ranks first under the migration order.
  const Individual& best() const;
  double test_auc_of(std::uint64_t key) const;
};

/// Pools the island populations, orders them by fitness (descending), then
/// cardinality, then key, keeps the top ps and renumbers keys 0..ps-1.
Population migrate(const std::vector<Population>& islands, std::size_t ps, bool dedup = false);

/// Scores each member's stored model on `test` projected by its mask.
std::vector<KeyedAuc> evaluate_test(const Population& pop, const Dataset& test);

/// Island-model driver. The result is a pure function of (config minus
/// threads, train, test); only Timings depend on scheduling.
RunReport run(const EngineConfig& config, const Dataset& train, const Dataset& test);

}  // namespace cbde
