#include "cbde/analysis.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace cbde;

namespace {

RunReport fake_run(std::size_t popcount, double test_auc, double fitness = 0.5, std::size_t n = 100,
                   Variant variant = Variant::BDE) {
  RunReport r;
  r.config.variant = variant;
  r.n_features = n;
  r.final_population.n_features = n;
  Individual best;
  best.key = 0;
  best.mask = FeatureMask(n);
  for (std::size_t j = 0; j < popcount; ++j) best.mask.set(j);
  best.fitness = fitness;
  best.auc = test_auc;
  r.final_population.members.push_back(best);
  r.test_aucs.push_back({0, test_auc});
  return r;
}

RunReport with_mask(std::size_t first_bit, double auc) {
  auto r = fake_run(1, auc, 0.5, 10);
  r.final_population.members[0].mask = FeatureMask(10);
  r.final_population.members[0].mask.set(first_bit);
  return r;
}

}  // namespace

TEST(Speedup, Examples) {
  EXPECT_EQ(format_speedup(speedup(14707.06, 4729.22)), "3.10");
  EXPECT_EQ(format_speedup(speedup(3952.72, 1896.56)), "2.08");
  EXPECT_EQ(format_speedup(1.0), "1.00");
  EXPECT_EQ(format_speedup(2.3), "2.30");
  EXPECT_EQ(format_speedup(3.2481), "3.24");
  EXPECT_ANY_THROW(format_speedup(-1.0));
  EXPECT_EQ(speedup(12.5, 12.5), 1.0);
  EXPECT_ANY_THROW(speedup(0.0, 1.0));
  EXPECT_ANY_THROW(speedup(1.0, -1.0));
}

TEST(TTest, MatchesBoostReference) {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(20), b(20);
    const double shift = 0.25 * t / 10.0;
    for (auto& v : a) v = normal(gen);
    for (auto& v : b) v = normal(gen) * 1.3 + shift;

    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / 20;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / 20;
    double ssa = 0, ssb = 0;
    for (const double v : a) ssa += (v - ma) * (v - ma);
    for (const double v : b) ssb += (v - mb) * (v - mb);
    const double sp2 = (ssa + ssb) / 38.0;
    const double t_ref = (ma - mb) / std::sqrt(sp2 * (2.0 / 20.0));
    const boost::math::students_t dist(38.0);
    const double p_ref = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t_ref)));

    const auto got = t_test(a, b);
    EXPECT_EQ(got.df, 38.0);
    EXPECT_NEAR(got.t, t_ref, 1e-9);
    EXPECT_NEAR(got.p, p_ref, 1e-9);
  }
}

TEST(TTest, IdenticalSamplesGiveZeroAndOne) {
  const std::vector<double> a{1, 2, 3, 4};
  const auto same = t_test(a, a);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_EQ(same.p, 1.0);
  const std::vector<double> shuffled{3, 1, 4, 2};
  const auto perm = t_test(a, shuffled);
  EXPECT_EQ(perm.t, 0.0);
  EXPECT_EQ(perm.p, 1.0);
}

TEST(TTest, SymmetryScaleAndMonotonicity) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  std::vector<double> a(20), b(20);
  for (auto& v : a) v = normal(gen);
  for (auto& v : b) v = normal(gen) + 0.5;
  const auto ab = t_test(a, b), ba = t_test(b, a);
  EXPECT_DOUBLE_EQ(ab.t, -ba.t);
  EXPECT_DOUBLE_EQ(ab.p, ba.p);

  std::vector<double> sa = a, sb = b;
  for (auto& v : sa) v = 3.0 * v + 7.0;
  for (auto& v : sb) v = 3.0 * v + 7.0;
  EXPECT_NEAR(t_test(sa, sb).t, ab.t, 1e-9);
  EXPECT_NEAR(t_test(sa, sb).p, ab.p, 1e-12);

  double prev = 1.0;
  for (double shift = 0.1; shift < 2.0; shift += 0.2) {
    std::vector<double> moved = a;
    for (auto& v : moved) v += shift;
    const double p = t_test(a, moved).p;
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(TTest, Errors) {
  const std::vector<double> one{1.0};
  const std::vector<double> flat{2.0, 2.0, 2.0};
  const std::vector<double> other{3.0, 3.0};
  EXPECT_ANY_THROW(t_test(one, one));
  EXPECT_THROW(t_test(flat, other), NumericError);
}

TEST(IncompleteBeta, KnownValues) {
  EXPECT_EQ(incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(incomplete_beta(2.0, 3.0, 1.0), 1.0);
  EXPECT_NEAR(incomplete_beta(1.0, 1.0, 0.3), 0.3, 1e-14);
  // I_x(2, 2) = 3x^2 - 2x^3
  EXPECT_NEAR(incomplete_beta(2.0, 2.0, 0.4), 3 * 0.16 - 2 * 0.064, 1e-14);
  const boost::math::students_t dist(5.0);
  EXPECT_NEAR(student_t_two_tailed(2.1, 5.0), 2.0 * boost::math::cdf(boost::math::complement(dist, 2.1)), 1e-12);
}

TEST(Summarize, Examples) {
  const std::vector<RunReport> one{fake_run(86, 0.892)};
  const auto s1 = summarize(one);
  EXPECT_EQ(s1.avg_cardinality, 86.0);
  EXPECT_EQ(s1.mean_auc, 0.892);
  EXPECT_EQ(s1.runs, 1u);
  EXPECT_EQ(s1.variant, "bde");

  const std::vector<RunReport> two{fake_run(80, 0.8), fake_run(90, 0.9)};
  EXPECT_EQ(summarize(two).avg_cardinality, 85.0);

  const std::vector<RunReport> mixed{fake_run(80, 0.8), fake_run(90, 0.9, 0.5, 100, Variant::CBDE_LM)};
  EXPECT_ANY_THROW(summarize(mixed));
}

TEST(Summarize, MatchesRecomputation) {
  std::mt19937_64 gen(7);
  std::vector<RunReport> runs;
  double card_sum = 0, auc_sum = 0;
  for (int r = 0; r < 20; ++r) {
    const std::size_t card = 1 + gen() % 60;
    const double auc = 0.5 + static_cast<double>(gen() % 1000) / 2000.0;
    runs.push_back(fake_run(card, auc, 0.1 * r));
    card_sum += static_cast<double>(card);
    auc_sum += auc;
  }
  const auto s = summarize(runs);
  EXPECT_NEAR(s.avg_cardinality, card_sum / 20, 1e-12);
  EXPECT_NEAR(s.mean_auc, auc_sum / 20, 1e-12);
  ASSERT_EQ(s.best_fitness.size(), 20u);
  EXPECT_DOUBLE_EQ(s.best_fitness[3], 0.3);
}

TEST(Repeatability, ThresholdArithmetic) {
  std::vector<RunReport> nine;
  for (int r = 0; r < 20; ++r) nine.push_back(r < 9 ? with_mask(0, 0.9) : with_mask(1 + r % 9, 0.7));
  const auto found = repeatability(nine);
  ASSERT_TRUE(found.has_value());
  EXPECT_EQ(found->count, 9u);
  EXPECT_DOUBLE_EQ(found->frequency, 0.45);
  EXPECT_EQ(found->cardinality, 1u);
  EXPECT_DOUBLE_EQ(found->mean_auc, 0.9);

  std::vector<RunReport> seven;
  for (int r = 0; r < 20; ++r) seven.push_back(r < 7 ? with_mask(0, 0.9) : with_mask(1 + r % 9, 0.7));
  EXPECT_FALSE(repeatability(seven).has_value());

  std::vector<RunReport> eight;
  for (int r = 0; r < 20; ++r) eight.push_back(r < 8 ? with_mask(0, 0.9) : with_mask(1 + r % 9, 0.7));
  EXPECT_TRUE(repeatability(eight).has_value());
}

TEST(CompareBatteries, SelfAndSeparated) {
  BatterySummary x;
  x.variant = "bde";
  x.runs = 20;
  std::mt19937_64 gen(3);
  for (int r = 0; r < 20; ++r) x.best_fitness.push_back(0.1 + 0.1 * static_cast<double>(gen() % 100) / 100.0);
  const auto self = compare_batteries(x, x);
  EXPECT_EQ(self.test.p, 1.0);
  EXPECT_FALSE(self.significant);

  BatterySummary y = x;
  y.variant = "cbde-lm";
  for (auto& f : y.best_fitness) f += 0.7;
  const auto sep = compare_batteries(x, y);
  EXPECT_TRUE(sep.significant);
  EXPECT_LT(sep.test.p, kSignificanceLevel);

  BatterySummary shorter = y;
  shorter.best_fitness.pop_back();
  shorter.runs = 19;
  EXPECT_ANY_THROW(compare_batteries(x, shorter));
}

TEST(ComparisonCsv, Layout) {
  const std::vector<RunReport> a{fake_run(2, 0.8, 0.3), fake_run(4, 0.9, 0.4)};
  const std::vector<RunReport> b{fake_run(3, 0.7, 0.5, 100, Variant::CBDE_TM),
                                 fake_run(3, 0.75, 0.6, 100, Variant::CBDE_TM)};
  const std::vector<BatterySummary> sums{summarize(a), summarize(b)};
  const std::vector<Comparison> cmp{compare_batteries(sums[0], sums[1])};
  const auto csv = comparison_csv(sums, cmp);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "variant,avg_cardinality,mean_auc,repeat_cardinality,repeat_auc,t,p,significant");
  EXPECT_EQ(lines[1].rfind("bde,3,", 0), 0u);
  EXPECT_EQ(lines[3].rfind("bde vs cbde-tm,,,,,", 0), 0u);
  EXPECT_EQ(lines[3].find('-', 15), std::string::npos);  // |t| reported
  const auto j = comparison_json(sums, cmp);
  EXPECT_EQ(j["summaries"].size(), 2u);
  EXPECT_EQ(j["comparisons"].size(), 1u);
}
