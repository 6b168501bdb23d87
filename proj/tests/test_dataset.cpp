#include "cbde/dataset.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace cbde;

namespace {

Dataset make_dataset(Index rows, Index cols, Index positives, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Dataset ds;
  ds.features.resize(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) ds.features(i, j) = normal(gen);
  }
  ds.labels = LabelVector::Zero(rows);
  for (Index i = 0; i < positives; ++i) ds.labels[i] = 1;
  return ds;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path, std::ios::binary) << contents;
  return path;
}

}  // namespace

TEST(LoadCsv, ParsesNamedLabel) {
  const auto ds = load_csv(temp_file("cbde_small.csv", "a,b,y\n1,2,0\n3,4,1\n5,6,1"), std::string("y"));
  EXPECT_EQ(ds.n_features(), 2);
  EXPECT_EQ(ds.rows(), 3);
  EXPECT_EQ(ds.labels, (LabelVector(3) << 0, 1, 1).finished());
  EXPECT_EQ(ds.features(2, 1), 6.0);
  EXPECT_EQ(ds.feature_names, (std::vector<std::string>{"a", "b"}));
}

TEST(LoadCsv, NonNumericCellNamesRowAndColumn) {
  try {
    parse_csv("a,b,y\n1,x,0\n", std::string("y"));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column b"), std::string::npos) << msg;
  }
}

TEST(LoadCsv, ErrorCases) {
  EXPECT_THROW(parse_csv("a,b,y\n1,2\n", std::string("y")), DataError);            // ragged
  EXPECT_THROW(parse_csv("a,b,y\n1,2,0\n", std::string("z")), DataError);          // unknown label column
  EXPECT_THROW(parse_csv("a,b,y\n1,2,2\n", std::string("y")), DataError);          // label outside {0,1}
  EXPECT_THROW(parse_csv("a,b,y\n1,inf,0\n", std::string("y")), DataError);        // non-finite
  EXPECT_THROW(load_csv("/nonexistent/cbde.csv", std::string("y")), DataError);    // I/O
}

TEST(LoadCsv, QuotedFieldsIndexedLabelAndCustomTokens) {
  CsvOptions opts;
  opts.labels.positive = {"yes"};
  opts.labels.negative = {"no"};
  const auto ds = parse_csv("\"first, name\",y,b\r\n1.5,yes,2\r\n-3,no,\"4\"\r\n", std::size_t{1}, opts);
  EXPECT_EQ(ds.feature_names.front(), "first, name");
  EXPECT_EQ(ds.labels, (LabelVector(2) << 1, 0).finished());
  EXPECT_EQ(ds.features(1, 1), 4.0);
}

TEST(LoadCsv, HeaderlessFile) {
  CsvOptions opts;
  opts.has_header = false;
  const auto ds = parse_csv("1,2,-1\n3,4,+1\n", std::size_t{2}, opts);
  EXPECT_EQ(ds.labels, (LabelVector(2) << 0, 1).finished());
  EXPECT_TRUE(ds.feature_names.empty());
}

TEST(LoadCsv, RoundTripsRandomFiles) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int trial = 0; trial < 3; ++trial) {
    Dataset ds = make_dataset(1000, 7, 400, 100 + trial);
    for (Index i = 0; i < ds.rows(); ++i) ds.features(i, trial) = u(gen);  // wide-range column
    ds.feature_names = {"a", "b", "c,d", "e", "f", "g", "h"};
    const auto path = std::filesystem::temp_directory_path() / "cbde_roundtrip.csv";
    write_csv(ds, path, "label");
    const auto back = load_csv(path, std::string("label"));
    EXPECT_EQ(back.features, ds.features);
    EXPECT_EQ(back.labels, ds.labels);
    EXPECT_EQ(back.feature_names, ds.feature_names);
    // Same bytes, same dataset.
    const auto again = load_csv(path, std::string("label"));
    EXPECT_EQ(again.features, back.features);
  }
}

TEST(LoadLibsvm, ParsesSparseRows) {
  const auto one = parse_libsvm("+1 3:0.5\n", Index{4});
  EXPECT_EQ(one.n_features(), 4);
  EXPECT_EQ(one.features.row(0), (Eigen::RowVectorXd(4) << 0, 0, 0.5, 0).finished());
  EXPECT_EQ(one.labels[0], 1);
  EXPECT_EQ(one.storage, Storage::Sparse);

  const auto empty_row = parse_libsvm("-1\n+1 1:1\n", Index{3});
  EXPECT_EQ(empty_row.features.row(0), Eigen::RowVectorXd::Zero(3));
  EXPECT_EQ(empty_row.labels[0], 0);

  const auto autosize = load_libsvm(temp_file("cbde_small.svm", "1 1:1\n-1 2:1"));
  EXPECT_EQ(autosize.n_features(), 2);
  EXPECT_EQ(autosize.labels, (LabelVector(2) << 1, 0).finished());
}

TEST(LoadLibsvm, Errors) {
  EXPECT_THROW(parse_libsvm("1 2:1 2:3\n"), DataError);     // not strictly increasing
  EXPECT_THROW(parse_libsvm("1 3:1 2:3\n"), DataError);
  EXPECT_THROW(parse_libsvm("1 5:1\n", Index{4}), DataError);  // index > n_features
  EXPECT_THROW(parse_libsvm("1 a:1\n"), DataError);
  EXPECT_THROW(parse_libsvm("1 2:x\n"), DataError);
  EXPECT_THROW(parse_libsvm("1 0:1\n"), DataError);
  EXPECT_THROW(parse_libsvm("3 1:1\n"), DataError);
}

TEST(StratifiedSplit, RoundingRule) {
  const auto ds = make_dataset(10, 2, 6);
  const auto s = stratified_split(ds, 0.2, 5);
  EXPECT_EQ(s.test.rows(), 2);
  EXPECT_EQ(s.test.count(1), 1);
  EXPECT_EQ(s.test.count(0), 1);
  EXPECT_EQ(s.train.rows(), 8);

  const auto half = stratified_split(make_dataset(4, 1, 2), 0.5, 1);
  EXPECT_EQ(half.test.count(1), 1);
  EXPECT_EQ(half.test.count(0), 1);
}

TEST(StratifiedSplit, RoundsHalfUp) {
  // 5 positives * 0.1 = 0.5 -> 1 test row.
  const auto s = stratified_split(make_dataset(10, 1, 5), 0.1, 3);
  EXPECT_EQ(s.test.count(1), 1);
  EXPECT_EQ(s.test.count(0), 1);
}

TEST(StratifiedSplit, DeterministicAndPartitioning) {
  const auto ds = make_dataset(57, 3, 20, 9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = stratified_split(ds, 0.3, seed);
    const auto b = stratified_split(ds, 0.3, seed);
    EXPECT_EQ(a.test.features, b.test.features);
    EXPECT_EQ(a.train.features, b.train.features);
    EXPECT_EQ(a.train.rows() + a.test.rows(), ds.rows());
    EXPECT_EQ(a.train.count(1) + a.test.count(1), ds.count(1));
    // Every original row lands in exactly one side (rows are distinct).
    for (Index i = 0; i < ds.rows(); ++i) {
      int hits = 0;
      for (const auto* part : {&a.train, &a.test}) {
        for (Index r = 0; r < part->rows(); ++r) hits += part->features.row(r) == ds.features.row(i);
      }
      EXPECT_EQ(hits, 1);
    }
  }
}

TEST(StratifiedSplit, RejectsTinyClasses) {
  EXPECT_THROW(stratified_split(make_dataset(10, 1, 1), 0.2, 0), DataError);
  EXPECT_THROW(stratified_split(make_dataset(10, 1, 5), 0.05, 0), DataError);
  EXPECT_THROW(stratified_split(make_dataset(10, 1, 5), 1.0, 0), DataError);
}

TEST(Shard, BalancedTwoWay) {
  const auto shards = shard(make_dataset(8, 2, 4), 2, 3);
  ASSERT_EQ(shards.size(), 2u);
  for (const auto& s : shards) {
    EXPECT_EQ(s.subset.rows(), 4);
    EXPECT_EQ(s.subset.count(1), 2);
    EXPECT_EQ(s.subset.count(0), 2);
  }
}

TEST(Shard, SingleShardIsPermutationOfTrain) {
  const auto ds = make_dataset(9, 2, 4);
  const auto shards = shard(ds, 1, 8);
  ASSERT_EQ(shards.size(), 1u);
  EXPECT_EQ(shards[0].subset.rows(), ds.rows());
  EXPECT_EQ(shards[0].subset.features, ds.features);  // rows come back in original order
}

TEST(Shard, ExhaustiveDisjointUnionAndBalance) {
  for (Index rows = 4; rows <= 14; ++rows) {
    for (Index pos = 2; pos <= rows - 2; ++pos) {
      const auto ds = make_dataset(rows, 1, pos, static_cast<std::uint64_t>(rows * 31 + pos));
      const auto min_class = static_cast<std::size_t>(std::min(pos, rows - pos));
      for (std::size_t k = 1; k <= min_class; ++k) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
          const auto shards = shard(ds, k, seed);
          std::vector<int> seen(static_cast<std::size_t>(rows), 0);
          Index lo1 = rows, hi1 = 0, lo0 = rows, hi0 = 0;
          for (const auto& s : shards) {
            EXPECT_GE(s.subset.count(1), 1);
            EXPECT_GE(s.subset.count(0), 1);
            lo1 = std::min(lo1, s.subset.count(1));
            hi1 = std::max(hi1, s.subset.count(1));
            lo0 = std::min(lo0, s.subset.count(0));
            hi0 = std::max(hi0, s.subset.count(0));
            for (Index r = 0; r < s.subset.rows(); ++r) {
              for (Index i = 0; i < rows; ++i) {
                if (ds.features(i, 0) == s.subset.features(r, 0)) ++seen[static_cast<std::size_t>(i)];
              }
            }
          }
          EXPECT_LE(hi1 - lo1, 1);
          EXPECT_LE(hi0 - lo0, 1);
          for (const int c : seen) EXPECT_EQ(c, 1);
        }
      }
    }
  }
}

TEST(Shard, RejectsTooManyShards) {
  EXPECT_THROW(shard(make_dataset(10, 1, 3), 4, 0), DataError);
  EXPECT_THROW(shard(make_dataset(10, 1, 3), 0, 0), DataError);
}

TEST(Project, SelectsColumns) {
  Dataset ds;
  ds.features = (Matrix(1, 3) << 1, 2, 3).finished();
  ds.labels = (LabelVector(1) << 1).finished();
  EXPECT_EQ(project(ds, FeatureMask::from_string("111")).features, ds.features);
  EXPECT_EQ(project(ds, FeatureMask::from_string("101")).features, (Matrix(1, 2) << 1, 3).finished());
  EXPECT_THROW(project(ds, FeatureMask::from_string("000")), DataError);
  EXPECT_THROW(project(ds, FeatureMask::from_string("10")), DataError);
}

TEST(Project, IdempotentAndWidthEqualsPopcount) {
  std::mt19937_64 gen(4);
  const auto ds = make_dataset(6, 12, 3);
  for (int t = 0; t < 200; ++t) {
    FeatureMask m(12);
    for (std::size_t j = 0; j < 12; ++j) m.set(j, gen() & 1);
    if (m.popcount() == 0) m.set(gen() % 12);
    const auto p = project(ds, m);
    EXPECT_EQ(static_cast<std::size_t>(p.n_features()), m.popcount());
    EXPECT_EQ(project(p, FeatureMask(m.popcount(), true)).features, p.features);
    EXPECT_EQ(p.labels, ds.labels);
  }
}

TEST(Standardize, TwoPointAndConstantColumns) {
  Dataset train;
  train.features = (Matrix(2, 2) << 1, 5, 3, 5).finished();
  train.labels = (LabelVector(2) << 0, 1).finished();
  Dataset test = train;
  test.features = (Matrix(1, 2) << 4, 7).finished();
  test.labels = (LabelVector(1) << 1).finished();
  const auto s = standardize(train, test);
  EXPECT_EQ(s.mean, (Vector(2) << 2, 5).finished());
  EXPECT_EQ(s.stddev, (Vector(2) << 1, 0).finished());
  EXPECT_EQ(s.train.features, (Matrix(2, 2) << -1, 0, 1, 0).finished());
  EXPECT_EQ(s.test.features, (Matrix(1, 2) << 2, 2).finished());
}

TEST(Standardize, RandomMatrixHasUnitMoments) {
  auto ds = make_dataset(100, 5, 50, 77);
  ds.features.col(2) = ds.features.col(2) * 1000.0 + Vector::Constant(100, 3.0);
  const auto s = standardize(ds, ds);
  for (Index j = 0; j < 5; ++j) {
    const auto col = s.train.features.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    EXPECT_LT(std::abs(mean), 1e-12);
    EXPECT_LT(std::abs(sd - 1.0), 1e-12);
  }
}
