#pragma once

#include "cbde/engine.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbde {

struct RepeatedSubset {
  FeatureMask mask;
  std::size_t count = 0;
  double frequency = 0.0;  // count / runs
  std::size_t cardinality = 0;
  double mean_auc = 0.0;  // mean test AUC over the runs that found it
};

struct BatterySummary {
  std::string variant;
  std::size_t runs = 0;
  std::size_t n_features = 0;
  double avg_cardinality = 0.0;
  double mean_auc = 0.0;
  std::vector<double> best_fitness;  // one per run, in run order
  std::optional<RepeatedSubset> most_repeated;
};

/// Averages the per-run best individuals (cardinality and test AUC) and
/// attaches the repeatability result at the default threshold.
BatterySummary summarize(std::span<const RunReport> runs);

/// Modal best mask across runs, returned only when it recurs in at least
/// threshold * runs of them. Frequency ties go to higher mean test AUC, then
/// lower cardinality.
std::optional<RepeatedSubset> repeatability(std::span<const RunReport> runs, double threshold = 0.4);

double speedup(double sequential_seconds, double parallel_seconds);

/// Two decimals, truncated toward zero (3.1098 -> "3.10").
std::string format_speedup(double value);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided tail P(|T| >= |t|) of Student's t with df degrees of freedom.
double student_t_two_tailed(double t, double df);

struct TTest {
  double t = 0.0;  // signed: positive when mean(a) > mean(b)
  double p = 1.0;  // two-tailed
  double df = 0.0;
};

/// Pooled-variance two-sample t-test with |a| + |b| - 2 degrees of freedom.
TTest t_test(std::span<const double> a, std::span<const double> b);

inline constexpr double kSignificanceLevel = 0.05;

struct Comparison {
  std::string x;
  std::string y;
  TTest test;
  bool significant = false;  // p < 0.05
};

Comparison compare_batteries(const BatterySummary& x, const BatterySummary& y);

/// Table rows under the header
///   variant,avg_cardinality,mean_auc,repeat_cardinality,repeat_auc,t,p,significant
/// Summary rows leave t/p/significant empty; comparison rows ("A vs B")
/// leave the first four value columns empty and report |t|.
std::string comparison_csv(std::span<const BatterySummary> summaries, std::span<const Comparison> comparisons);
nlohmann::json comparison_json(std::span<const BatterySummary> summaries, std::span<const Comparison> comparisons);
nlohmann::json to_json(const BatterySummary& s);

}  // namespace cbde
