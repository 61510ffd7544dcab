#include "lenslevel/learn/boosting.hpp"

#include <cmath>
#include <numeric>

#include "lenslevel/learn/logistic.hpp"

namespace lenslevel::learn {

double mean_log_loss(std::span<const double> z, std::span<const int> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    // log(1 + exp(-s)) with s = +z for positives and -z for negatives.
    const double s = y[i] != 0 ? z[i] : -z[i];
    sum += s >= 0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
  }
  return z.empty() ? 0.0 : sum / static_cast<double>(z.size());
}

void GradientBoosting::fit(const Matrix& X, std::span<const int> y) {
  check_training_data(X, y);
  if (params_.learning_rate < 0 || !std::isfinite(params_.learning_rate))
    throw ValidationError("gradient_boosting: learning_rate must be a finite non-negative number");
  const std::size_t n = X.rows();
  std::size_t positives = 0;
  for (int v : y) positives += v != 0;
  if (positives == 0 || positives == n) throw Error("gradient_boosting: training data holds a single class");

  const double rate = static_cast<double>(positives) / static_cast<double>(n);
  init_ = std::log(rate / (1.0 - rate));
  stages_.clear();
  stages_.reserve(params_.n_stages);

  std::vector<double> score(n, init_);
  std::vector<double> residual(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  train_loss_.assign(1, mean_log_loss(score, y));

  TreeParams tp;
  tp.max_depth = params_.max_depth;
  tp.min_samples_split = params_.min_samples_split;
  for (std::size_t s = 0; s < params_.n_stages; ++s) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = (y[i] != 0 ? 1.0 : 0.0) - sigmoid(score[i]);
    DecisionTree tree;
    tree.fit(X, residual, all, SplitCriterion::squared_error, tp);
    for (std::size_t i = 0; i < n; ++i) score[i] += params_.learning_rate * tree.predict(X.row(i));
    stages_.push_back(std::move(tree));
    train_loss_.push_back(mean_log_loss(score, y));
  }
  fitted_ = true;
}

double GradientBoosting::decision_function(std::span<const double> x) const {
  if (!fitted_) throw Error("gradient_boosting: model is not fitted");
  double z = init_;
  for (const auto& tree : stages_) z += params_.learning_rate * tree.predict(x);
  return z;
}

double GradientBoosting::predict_proba(std::span<const double> x) const { return sigmoid(decision_function(x)); }

}  // namespace lenslevel::learn
