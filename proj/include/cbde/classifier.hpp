#pragma once

#include "cbde/dataset.hpp"
#include "cbde/types.hpp"

#include <vector>

namespace cbde {

struct TrainConfig {
  double learning_rate = 0.1;
  int max_iters = 100;
  double tolerance = 1e-6;  // stop once the gradient's infinity-norm drops below
  double l2 = 0.0;          // optional ridge penalty on the coefficients (not the intercept)

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct LRModel {
  Vector coefficients;
  double intercept = 0.0;
  TrainConfig config;

  Index n_features() const noexcept { return coefficients.size(); }
};

/// Element-wise logistic function, usable on any Eigen array expression.
template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& z) {
  return (1.0 + (-z).exp()).inverse();
}

/// Mean negative log-likelihood plus (l2 / 2) * |w|^2.
double lr_loss(const Matrix& x, const LabelVector& y, const Eigen::Ref<const Vector>& w, double b, double l2 = 0.0);

struct LossGradient {
  Vector dw;
  double db = 0.0;
};

LossGradient lr_gradient(const Matrix& x, const LabelVector& y, const Eigen::Ref<const Vector>& w, double b,
                         double l2 = 0.0);

/// Per-iteration record of accepted losses, starting with the loss at the
/// zero initialization.
struct TrainTrace {
  std::vector<double> losses;
  int halvings = 0;
};

/// Full-batch gradient descent from zero. Each iteration tries the configured
/// step and halves it (at most 20 times) until the loss does not increase;
/// if no halving helps, training stops at the current point.
LRModel train_lr(const Dataset& ds, const TrainConfig& config = {}, TrainTrace* trace = nullptr);

/// sigmoid(intercept + x . coefficients) per row.
Vector predict_scores(const LRModel& model, const Dataset& ds);

/// Mann-Whitney AUC with midrank ties (half credit), O(n log n).
double auc(const Eigen::Ref<const Vector>& scores, const LabelVector& labels);

}  // namespace cbde
