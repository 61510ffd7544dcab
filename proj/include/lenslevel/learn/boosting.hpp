#pragma once

#include <vector>

#include "lenslevel/learn/model.hpp"
#include "lenslevel/learn/tree.hpp"

namespace lenslevel::learn {

// Gradient boosting on the logistic loss. Each stage fits a squared-error
// regression tree to the residuals y - p; a leaf's value is the mean residual of
// its rows, scaled by the learning rate.
class GradientBoosting final : public Classifier {
 public:
  explicit GradientBoosting(BoostingParams params = {}) : params_(params) {}

  void fit(const Matrix& X, std::span<const int> y) override;
  double predict_proba(std::span<const double> x) const override;
  using Classifier::predict_proba;

  double decision_function(std::span<const double> x) const;
  double initial_score() const { return init_; }
  std::size_t stage_count() const { return stages_.size(); }
  // Mean training log-loss after 0, 1, ..., n_stages stages.
  const std::vector<double>& train_loss() const { return train_loss_; }

 private:
  BoostingParams params_;
  double init_ = 0.0;
  std::vector<DecisionTree> stages_;
  std::vector<double> train_loss_;
  bool fitted_ = false;
};

// Mean negative log-likelihood of 0/1 labels under scores z (log-odds).
double mean_log_loss(std::span<const double> z, std::span<const int> y);

}  // namespace lenslevel::learn
