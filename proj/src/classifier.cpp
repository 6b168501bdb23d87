#include "cbde/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cbde {

namespace {

constexpr int kMaxHalvings = 20;

// log(1 + exp(z)) without overflow.
Eigen::ArrayXd softplus(const Eigen::ArrayXd& z) {
  return z.max(0.0) + (-z.abs()).exp().log1p();
}

}  // namespace

double lr_loss(const Matrix& x, const LabelVector& y, const Eigen::Ref<const Vector>& w, double b, double l2) {
  const Eigen::ArrayXd z = ((x * w).array() + b);
  const Eigen::ArrayXd yd = y.cast<double>().array();
  const double nll = (softplus(z) - yd * z).mean();
  return nll + 0.5 * l2 * w.squaredNorm();
}

LossGradient lr_gradient(const Matrix& x, const LabelVector& y, const Eigen::Ref<const Vector>& w, double b,
                         double l2) {
  const Eigen::ArrayXd z = ((x * w).array() + b);
  const Vector residual = (sigmoid(z) - y.cast<double>().array()).matrix();
  const auto n = static_cast<double>(x.rows());
  LossGradient g;
  g.dw = x.transpose() * residual / n + l2 * w;
  g.db = residual.sum() / n;
  return g;
}

LRModel train_lr(const Dataset& ds, const TrainConfig& config, TrainTrace* trace) {
  if (ds.count(0) == 0 || ds.count(1) == 0) throw DataError("logistic regression needs both classes");
  if (ds.rows() != ds.labels.size()) throw DataError("row/label count mismatch");

  LRModel model;
  model.config = config;
  model.coefficients = Vector::Zero(ds.n_features());
  model.intercept = 0.0;

  double loss = lr_loss(ds.features, ds.labels, model.coefficients, model.intercept, config.l2);
  if (trace) trace->losses.push_back(loss);

  for (int it = 0; it < config.max_iters; ++it) {
    const auto g = lr_gradient(ds.features, ds.labels, model.coefficients, model.intercept, config.l2);
    if (!g.dw.allFinite() || !std::isfinite(g.db)) throw NumericError("non-finite gradient in LR training");
    const double inf_norm = std::max(g.dw.size() ? g.dw.cwiseAbs().maxCoeff() : 0.0, std::abs(g.db));
    if (inf_norm < config.tolerance) break;

    double step = config.learning_rate;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      const Vector w = model.coefficients - step * g.dw;
      const double b = model.intercept - step * g.db;
      const double candidate = lr_loss(ds.features, ds.labels, w, b, config.l2);
      if (!std::isfinite(candidate)) throw NumericError("non-finite loss in LR training");
      if (candidate <= loss) {
        model.coefficients = w;
        model.intercept = b;
        loss = candidate;
        accepted = true;
        break;
      }
      step *= 0.5;
      if (trace) ++trace->halvings;
    }
    if (!accepted) break;
    if (trace) trace->losses.push_back(loss);
  }
  return model;
}

Vector predict_scores(const LRModel& model, const Dataset& ds) {
  if (ds.n_features() != model.n_features()) {
    throw DataError("model has " + std::to_string(model.n_features()) + " coefficients but data has " +
                    std::to_string(ds.n_features()) + " columns");
  }
  const Eigen::ArrayXd z = (ds.features * model.coefficients).array() + model.intercept;
  return sigmoid(z).matrix();
}

double auc(const Eigen::Ref<const Vector>& scores, const LabelVector& labels) {
  if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
  const Index n = scores.size();
  const auto n_pos = static_cast<double>((labels.array() == 1).count());
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("AUC is undefined for single-class labels");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });

  // Sum of 1-based midranks over positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) rank_sum += midrank;
    }
    i = j;
  }
  const double u = rank_sum - n_pos * (n_pos + 1.0) / 2.0;
  return u / (n_pos * n_neg);
}

}  // namespace cbde
