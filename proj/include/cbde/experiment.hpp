#pragma once

#include "cbde/analysis.hpp"
#include "cbde/dataset.hpp"
#include "cbde/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cbde {

struct SyntheticSpec {
  std::size_t n_samples = 1000;
  std::size_t n_features = 20;
  std::size_t n_informative = 5;
  double noise = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  Dataset data;
  std::vector<std::size_t> informative;  // 0-based column indices, ascending
};

/// Standard normal features; label = [x_S . w + noise * e > 0] where S is a
/// random n_informative-subset and w has random signs and magnitudes in
/// [0.5, 1.5). Columns outside S are pure noise.
SyntheticData synthesize(const SyntheticSpec& spec);

enum class DatasetFormat { Csv, Libsvm, Synthetic };

/// Everything a battery needs. Parsed from a flat "key = value" file; see
/// docs/config.md for the key list.
struct ExperimentConfig {
  DatasetFormat format = DatasetFormat::Synthetic;
  std::filesystem::path dataset_path;
  std::string label_column = "label";  // header name, or "#<index>"
  std::optional<Index> libsvm_features;
  SyntheticSpec synthetic;

  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;

  EngineConfig engine;

  std::size_t n_runs = 20;
  std::uint64_t base_seed = 0;
  bool parallel_runs = false;  // run whole battery members concurrently, one thread each

  std::filesystem::path output_dir = "out";

  void validate() const;
  /// Flat key/value echo that parses back to an equal config.
  std::map<std::string, std::string> to_map() const;
};

/// Unknown keys, malformed values and invariant violations raise ConfigError
/// naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& config);

/// Dataset after loading/generating, splitting and standardizing.
struct PreparedData {
  Dataset train;
  Dataset test;
  std::map<std::string, std::string> provenance;
};

PreparedData prepare_data(const ExperimentConfig& config);

/// Runs the battery; run r uses master seed base_seed + r.
std::vector<RunReport> run_battery(const ExperimentConfig& config, const PreparedData& data);

/// run: writes run_NNN.json per run plus summary.json / summary.csv.
int cmd_run(const ExperimentConfig& config);

/// compare: reads run_*.json from every directory and writes
/// comparison.csv / comparison.json into out_dir.
int cmd_compare(const std::vector<std::filesystem::path>& report_dirs, const std::filesystem::path& out_dir);

struct BenchRow {
  std::size_t threads = 0;
  double seconds = 0.0;
  double speedup = 0.0;
  bool identical = true;  // non-timing results equal to the 1-thread results
};

std::vector<BenchRow> bench(const ExperimentConfig& config, const std::vector<std::size_t>& thread_counts);
/// bench: writes speedup.csv into the output directory.
int cmd_bench(const ExperimentConfig& config, const std::vector<std::size_t>& thread_counts);

/// synth: writes the CSV plus "<out>.informative" listing planted columns.
int cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& out_path);

/// Reads every run_*.json in a directory, sorted by name.
std::vector<RunReport> read_battery(const std::filesystem::path& dir);

}  // namespace cbde
