#pragma once

#include "cbde/mask.hpp"
#include "cbde/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cbde {

enum class Storage { Dense, Sparse };

/// Binary-classification dataset. Rows are instances, columns are the N
/// features. Immutable once built; share by const reference across threads.
struct Dataset {
  Matrix features;
  LabelVector labels;
  std::vector<std::string> feature_names;  // empty or exactly N entries
  Storage storage = Storage::Dense;

  Index rows() const noexcept { return features.rows(); }
  Index n_features() const noexcept { return features.cols(); }
  Index count(int label) const noexcept { return (labels.array() == label).count(); }
};

/// Throws DataError when a structural invariant fails. With
/// require_both_classes the dataset must also contain at least one 0 and one 1.
void validate(const Dataset& ds, bool require_both_classes = false);

/// Row subset of `ds` in the order given.
Dataset take_rows(const Dataset& ds, const std::vector<Index>& rows);

/// Maps raw label tokens onto {0,1}. Defaults: {"1","+1"} -> 1, {"0","-1"} -> 0.
struct LabelMapping {
  std::vector<std::string> positive{"1", "+1"};
  std::vector<std::string> negative{"0", "-1"};

  std::optional<int> map(std::string_view token) const;
};

struct CsvOptions {
  bool has_header = true;
  char delimiter = ',';
  LabelMapping labels;
};

/// Column holding the class label: a header name or a 0-based index.
using LabelColumn = std::variant<std::string, std::size_t>;

/// Parses an RFC-4180-style CSV file. Errors name the 1-based data row and the
/// offending column (header name when available).
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                 const CsvOptions& options = {});
Dataset parse_csv(std::string_view text, const LabelColumn& label_column,
                  const CsvOptions& options = {});

/// Writes features followed by a final label column. Values use the shortest
/// representation that parses back to the identical double.
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const std::string& label_name = "label");
std::string format_csv(const Dataset& ds, const std::string& label_name = "label");

/// Parses "label idx:val ..." lines with strictly increasing 1-based indices.
/// n_features = nullopt infers N from the largest index seen.
Dataset load_libsvm(const std::filesystem::path& path, std::optional<Index> n_features = std::nullopt,
                    const LabelMapping& labels = {});
Dataset parse_libsvm(std::string_view text, std::optional<Index> n_features = std::nullopt,
                     const LabelMapping& labels = {});

struct Split {
  Dataset train;
  Dataset test;
};

/// Per class c the test set receives round-half-up(count(c) * test_fraction)
/// rows drawn without replacement; original row order is kept in both parts.
Split stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

struct DataShard {
  std::size_t island_id = 0;
  Dataset subset;
};

/// Disjoint stratified shards: each class is shuffled and dealt round-robin,
/// continuing the deal position across classes so shard totals stay balanced.
std::vector<DataShard> shard(const Dataset& train, std::size_t k, std::uint64_t seed);

/// Keeps exactly the set-bit columns of `mask`, in order.
Dataset project(const Dataset& ds, const FeatureMask& mask);

struct Standardization {
  Dataset train;
  Dataset test;
  Vector mean;
  Vector stddev;  // population std; 0 marks a constant column
};

/// Centers and scales columns using train statistics only.
Standardization standardize(const Dataset& train, const Dataset& test);

}  // namespace cbde
