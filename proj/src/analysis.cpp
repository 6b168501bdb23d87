#include "cbde/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cbde {

namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxTerms = 10000;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxTerms; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::optional<RepeatedSubset> repeatability(std::span<const RunReport> runs, double threshold) {
  if (runs.empty()) return std::nullopt;
  struct Tally {
    std::size_t count = 0;
    double auc_sum = 0.0;
  };
  std::map<FeatureMask, Tally> tallies;
  for (const auto& r : runs) {
    const auto& b = r.best();
    auto& t = tallies[b.mask];
    ++t.count;
    t.auc_sum += r.test_auc_of(b.key);
  }
  const FeatureMask* mode = nullptr;
  const Tally* mode_tally = nullptr;
  for (const auto& [mask, t] : tallies) {
    if (!mode) {
      mode = &mask;
      mode_tally = &t;
      continue;
    }
    const double mean_auc = t.auc_sum / static_cast<double>(t.count);
    const double best_auc = mode_tally->auc_sum / static_cast<double>(mode_tally->count);
    const bool better = t.count != mode_tally->count ? t.count > mode_tally->count
                        : mean_auc != best_auc        ? mean_auc > best_auc
                                                      : mask.popcount() < mode->popcount();
    if (better) {
      mode = &mask;
      mode_tally = &t;
    }
  }
  const auto n = static_cast<double>(runs.size());
  // Small slack so that e.g. 8 of 20 meets a 0.4 threshold despite rounding.
  if (static_cast<double>(mode_tally->count) < threshold * n - 1e-9) return std::nullopt;
  RepeatedSubset out;
  out.mask = *mode;
  out.count = mode_tally->count;
  out.frequency = static_cast<double>(mode_tally->count) / n;
  out.cardinality = mode->popcount();
  out.mean_auc = mode_tally->auc_sum / static_cast<double>(mode_tally->count);
  return out;
}

BatterySummary summarize(std::span<const RunReport> runs) {
  if (runs.empty()) throw std::invalid_argument("cannot summarize an empty battery");
  BatterySummary s;
  s.variant = std::string(to_string(runs.front().config.variant));
  s.runs = runs.size();
  s.n_features = runs.front().n_features;
  double card_sum = 0.0;
  double auc_sum = 0.0;
  for (const auto& r : runs) {
    if (r.config.variant != runs.front().config.variant) {
      throw std::invalid_argument("battery mixes variants " + s.variant + " and " +
                                  std::string(to_string(r.config.variant)));
    }
    if (r.n_features != s.n_features) throw std::invalid_argument("battery mixes datasets of different width");
    const auto& b = r.best();
    card_sum += static_cast<double>(b.mask.popcount());
    auc_sum += r.test_auc_of(b.key);
    s.best_fitness.push_back(*b.fitness);
  }
  s.avg_cardinality = card_sum / static_cast<double>(runs.size());
  s.mean_auc = auc_sum / static_cast<double>(runs.size());
  s.most_repeated = repeatability(runs);
  return s;
}

double speedup(double sequential_seconds, double parallel_seconds) {
  if (!(sequential_seconds > 0.0) || !(parallel_seconds > 0.0)) {
    throw std::invalid_argument("speedup needs positive timings");
  }
  return sequential_seconds / parallel_seconds;
}

std::string format_speedup(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("speedup must be finite and non-negative");
  // The small offset keeps exact hundredths such as 2.3 from truncating to 2.29.
  const double hundredths = std::floor(value * 100.0 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", hundredths / 100.0);
  return buf;
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

TTest t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t-test needs at least two values per sample");
  const double ma = mean(a);
  const double mb = mean(b);
  double ssa = 0.0;
  for (const double v : a) ssa += (v - ma) * (v - ma);
  double ssb = 0.0;
  for (const double v : b) ssb += (v - mb) * (v - mb);
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  TTest r;
  r.df = na + nb - 2.0;
  const double pooled = (ssa + ssb) / r.df;
  if (!(pooled > 0.0)) throw NumericError("t-test undefined: pooled variance is zero");
  r.t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  r.p = student_t_two_tailed(r.t, r.df);
  return r;
}

Comparison compare_batteries(const BatterySummary& x, const BatterySummary& y) {
  if (x.best_fitness.size() != y.best_fitness.size()) {
    throw std::invalid_argument("batteries differ in run count");
  }
  Comparison c;
  c.x = x.variant;
  c.y = y.variant;
  c.test = t_test(x.best_fitness, y.best_fitness);
  c.significant = c.test.p < kSignificanceLevel;
  return c;
}

std::string comparison_csv(std::span<const BatterySummary> summaries, std::span<const Comparison> comparisons) {
  std::string out = "variant,avg_cardinality,mean_auc,repeat_cardinality,repeat_auc,t,p,significant\n";
  for (const auto& s : summaries) {
    out += s.variant + ',' + fmt(s.avg_cardinality) + ',' + fmt(s.mean_auc) + ',';
    if (s.most_repeated) {
      out += std::to_string(s.most_repeated->cardinality) + ',' + fmt(s.most_repeated->mean_auc);
    } else {
      out += ',';
    }
    out += ",,,\n";
  }
  for (const auto& c : comparisons) {
    out += c.x + " vs " + c.y + ",,,,," + fmt(std::abs(c.test.t)) + ',' + fmt(c.test.p) + ',' +
           (c.significant ? "true" : "false") + '\n';
  }
  return out;
}

nlohmann::json to_json(const BatterySummary& s) {
  nlohmann::json j{{"variant", s.variant},
                   {"runs", s.runs},
                   {"n_features", s.n_features},
                   {"avg_cardinality", s.avg_cardinality},
                   {"mean_auc", s.mean_auc},
                   {"best_fitness", s.best_fitness}};
  if (s.most_repeated) {
    j["most_repeated"] = {{"mask", s.most_repeated->mask.to_hex()},
                          {"count", s.most_repeated->count},
                          {"frequency", s.most_repeated->frequency},
                          {"cardinality", s.most_repeated->cardinality},
                          {"mean_auc", s.most_repeated->mean_auc}};
  } else {
    j["most_repeated"] = nullptr;
  }
  return j;
}

nlohmann::json comparison_json(std::span<const BatterySummary> summaries, std::span<const Comparison> comparisons) {
  nlohmann::json j;
  j["summaries"] = nlohmann::json::array();
  for (const auto& s : summaries) j["summaries"].push_back(to_json(s));
  j["comparisons"] = nlohmann::json::array();
  for (const auto& c : comparisons) {
    j["comparisons"].push_back({{"x", c.x},
                                {"y", c.y},
                                {"t", std::abs(c.test.t)},
                                {"t_signed", c.test.t},
                                {"p", c.test.p},
                                {"df", c.test.df},
                                {"significant", c.significant}});
  }
  return j;
}

}  // namespace cbde
