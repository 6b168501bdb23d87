#include "cbde/dataset.hpp"

#include "cbde/rng.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cbde {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("read failure on " + path.string());
  return buf.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Splits CSV text into records of fields. Quoted fields may contain the
// delimiter, doubled quotes and line breaks.
std::vector<std::vector<std::string>> split_records(std::string_view text, char delim) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // A lone empty field is a blank line.
    if (!(record.size() == 1 && record.front().empty() && !field_started)) {
      records.push_back(std::move(record));
    }
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      field_started = true;
    } else if (c == delim) {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n') {
      end_record();
      ++line;
    } else if (c == '\r') {
      // tolerated before \n
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted field near line " + std::to_string(line));
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void append_real(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::optional<int> LabelMapping::map(std::string_view token) const {
  token = trim(token);
  for (const auto& p : positive) {
    if (token == p) return 1;
  }
  for (const auto& n : negative) {
    if (token == n) return 0;
  }
  return std::nullopt;
}

void validate(const Dataset& ds, bool require_both_classes) {
  if (ds.features.rows() != ds.labels.size()) {
    throw DataError("row count " + std::to_string(ds.features.rows()) + " differs from label count " +
                    std::to_string(ds.labels.size()));
  }
  if (ds.features.cols() < 1) throw DataError("dataset has no feature columns");
  if (!ds.feature_names.empty() && static_cast<Index>(ds.feature_names.size()) != ds.features.cols()) {
    throw DataError("feature name count does not match column count");
  }
  for (Index i = 0; i < ds.labels.size(); ++i) {
    if (ds.labels[i] != 0 && ds.labels[i] != 1) {
      throw DataError("label at row " + std::to_string(i) + " is not 0 or 1");
    }
  }
  if (!ds.features.allFinite()) throw DataError("dataset contains non-finite values");
  if (require_both_classes && (ds.count(0) == 0 || ds.count(1) == 0)) {
    throw DataError("dataset must contain both classes");
  }
}

Dataset take_rows(const Dataset& ds, const std::vector<Index>& rows) {
  Dataset out;
  out.features = ds.features(rows, Eigen::all);
  out.labels = ds.labels(rows);
  out.feature_names = ds.feature_names;
  out.storage = ds.storage;
  return out;
}

Dataset parse_csv(std::string_view text, const LabelColumn& label_column, const CsvOptions& options) {
  auto records = split_records(text, options.delimiter);
  if (records.empty()) throw DataError("CSV input is empty");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (options.has_header) {
    header = records.front();
    for (auto& h : header) h = std::string(trim(h));
    first_data = 1;
  }
  const std::size_t width = options.has_header ? header.size() : records.front().size();

  std::size_t label_idx = 0;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    if (!options.has_header) throw DataError("label column '" + *name + "' named but CSV has no header");
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw DataError("unknown label column '" + *name + "'");
    label_idx = static_cast<std::size_t>(it - header.begin());
  } else {
    label_idx = std::get<std::size_t>(label_column);
    if (label_idx >= width) throw DataError("label column index " + std::to_string(label_idx) + " out of range");
  }
  if (width < 2) throw DataError("CSV needs at least one feature column besides the label");

  auto column_name = [&](std::size_t c) {
    return options.has_header ? header[c] : std::to_string(c);
  };

  const auto n_rows = static_cast<Index>(records.size() - first_data);
  const auto n_feat = static_cast<Index>(width - 1);
  Dataset ds;
  ds.features.resize(n_rows, n_feat);
  ds.labels.resize(n_rows);
  for (Index r = 0; r < n_rows; ++r) {
    const auto& rec = records[first_data + static_cast<std::size_t>(r)];
    const std::string row_tag = "row " + std::to_string(r + 1);
    if (rec.size() != width) {
      throw DataError(row_tag + ": expected " + std::to_string(width) + " fields, found " +
                      std::to_string(rec.size()));
    }
    Index col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_idx) {
        const auto label = options.labels.map(rec[c]);
        if (!label) {
          throw DataError(row_tag + ", column " + column_name(c) + ": label '" + rec[c] +
                          "' does not map to 0/1");
        }
        ds.labels[r] = *label;
        continue;
      }
      const auto v = parse_real(rec[c]);
      if (!v) {
        throw DataError(row_tag + ", column " + column_name(c) + ": '" + rec[c] + "' is not a finite number");
      }
      ds.features(r, col++) = *v;
    }
  }
  if (options.has_header) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_idx) ds.feature_names.push_back(header[c]);
    }
  }
  validate(ds);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column, const CsvOptions& options) {
  return parse_csv(read_file(path), label_column, options);
}

std::string format_csv(const Dataset& ds, const std::string& label_name) {
  std::string out;
  for (Index c = 0; c < ds.n_features(); ++c) {
    out += ds.feature_names.empty() ? "x" + std::to_string(c) : csv_escape(ds.feature_names[c]);
    out += ',';
  }
  out += csv_escape(label_name);
  out += '\n';
  for (Index r = 0; r < ds.rows(); ++r) {
    for (Index c = 0; c < ds.n_features(); ++c) {
      append_real(out, ds.features(r, c));
      out += ',';
    }
    out += ds.labels[r] ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, const std::string& label_name) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << format_csv(ds, label_name);
  if (!out) throw DataError("write failure on " + path.string());
}

Dataset parse_libsvm(std::string_view text, std::optional<Index> n_features, const LabelMapping& labels) {
  using Triplet = Eigen::Triplet<Real, Index>;
  std::vector<Triplet> entries;
  std::vector<int> row_labels;
  Index max_index = 0;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const std::string where = "line " + std::to_string(line_no);

    std::istringstream tokens{std::string(line)};
    std::string tok;
    tokens >> tok;
    const auto label = labels.map(tok);
    if (!label) throw DataError(where + ": label '" + tok + "' does not map to 0/1");
    const auto row = static_cast<Index>(row_labels.size());
    row_labels.push_back(*label);

    Index prev = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      Index idx = 0;
      const auto [p, ec] = std::from_chars(tok.data(), tok.data() + (colon == std::string::npos ? 0 : colon), idx);
      if (colon == std::string::npos || ec != std::errc{} || p != tok.data() + colon || idx < 1) {
        throw DataError(where + ": unparseable token '" + tok + "'");
      }
      const auto v = parse_real(std::string_view(tok).substr(colon + 1));
      if (!v) throw DataError(where + ": unparseable value in '" + tok + "'");
      if (idx <= prev) throw DataError(where + ": feature indices must be strictly increasing");
      if (n_features && idx > *n_features) {
        throw DataError(where + ": index " + std::to_string(idx) + " exceeds n_features " +
                        std::to_string(*n_features));
      }
      prev = idx;
      max_index = std::max(max_index, idx);
      entries.emplace_back(row, idx - 1, *v);
    }
    if (eol == text.size()) break;
  }

  const Index n = n_features.value_or(max_index);
  if (n < 1) throw DataError("LIBSVM input has no features");
  Eigen::SparseMatrix<Real, Eigen::RowMajor, Index> sparse(static_cast<Index>(row_labels.size()), n);
  sparse.setFromTriplets(entries.begin(), entries.end());

  Dataset ds;
  ds.features = Matrix(sparse);
  ds.labels = Eigen::Map<const LabelVector>(row_labels.data(), static_cast<Index>(row_labels.size()));
  ds.storage = Storage::Sparse;
  validate(ds);
  return ds;
}

Dataset load_libsvm(const std::filesystem::path& path, std::optional<Index> n_features, const LabelMapping& labels) {
  return parse_libsvm(read_file(path), n_features, labels);
}

Split stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("test_fraction must lie in (0, 1)");
  }
  validate(ds);
  Rng rng(seed);
  std::vector<Index> test_rows;
  std::vector<Index> train_rows;
  for (int cls : {0, 1}) {
    std::vector<Index> members;
    for (Index i = 0; i < ds.rows(); ++i) {
      if (ds.labels[i] == cls) members.push_back(i);
    }
    const auto count = static_cast<double>(members.size());
    const auto n_test = static_cast<std::size_t>(std::floor(count * test_fraction + 0.5));
    if (n_test < 1 || n_test >= members.size()) {
      throw DataError("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                      " rows, too few to give both train and test at least one");
    }
    shuffle(members, rng);
    test_rows.insert(test_rows.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_rows.insert(train_rows.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {take_rows(ds, train_rows), take_rows(ds, test_rows)};
}

std::vector<DataShard> shard(const Dataset& train, std::size_t k, std::uint64_t seed) {
  validate(train);
  const auto min_class = static_cast<std::size_t>(std::min(train.count(0), train.count(1)));
  if (k < 1 || k > min_class) {
    throw DataError("cannot split " + std::to_string(min_class) + " rows of the smaller class into " +
                    std::to_string(k) + " shards that all hold both classes");
  }
  Rng rng(seed);
  std::vector<std::vector<Index>> rows(k);
  std::size_t next = 0;
  for (int cls : {0, 1}) {
    std::vector<Index> members;
    for (Index i = 0; i < train.rows(); ++i) {
      if (train.labels[i] == cls) members.push_back(i);
    }
    shuffle(members, rng);
    for (const Index r : members) {
      rows[next].push_back(r);
      next = (next + 1) % k;
    }
  }
  std::vector<DataShard> shards;
  shards.reserve(k);
  for (std::size_t s = 0; s < k; ++s) {
    std::sort(rows[s].begin(), rows[s].end());
    shards.push_back({s, take_rows(train, rows[s])});
  }
  return shards;
}

Dataset project(const Dataset& ds, const FeatureMask& mask) {
  if (static_cast<Index>(mask.size()) != ds.n_features()) {
    throw DataError("mask length " + std::to_string(mask.size()) + " does not match N = " +
                    std::to_string(ds.n_features()));
  }
  const auto cols = mask.selected();
  if (cols.empty()) throw DataError("cannot project onto an empty feature mask");
  Dataset out;
  out.features = ds.features(Eigen::all, cols);
  out.labels = ds.labels;
  out.storage = ds.storage;
  if (!ds.feature_names.empty()) {
    for (const auto c : cols) out.feature_names.push_back(ds.feature_names[c]);
  }
  return out;
}

Standardization standardize(const Dataset& train, const Dataset& test) {
  if (train.rows() == 0) throw DataError("cannot standardize an empty training set");
  if (test.n_features() != train.n_features()) throw DataError("train/test column counts differ");
  Standardization s;
  s.mean = train.features.colwise().mean().transpose();
  const Matrix centered = train.features.rowwise() - s.mean.transpose();
  s.stddev = (centered.array().square().colwise().sum() / static_cast<Real>(train.rows())).sqrt().transpose();
  const Vector scale = s.stddev.unaryExpr([](Real sd) { return sd > 0.0 ? 1.0 / sd : 1.0; });

  s.train = train;
  s.train.features = centered * scale.asDiagonal();
  s.test = test;
  s.test.features = (test.features.rowwise() - s.mean.transpose()) * scale.asDiagonal();
  return s;
}

}  // namespace cbde
