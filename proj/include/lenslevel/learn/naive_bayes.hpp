#pragma once

#include <array>
#include <vector>

#include "lenslevel/learn/model.hpp"

namespace lenslevel::learn {

// Per-class, per-feature Gaussians with empirical class priors. Variances are the
// population variance floored at params.var_floor.
class GaussianNaiveBayes final : public Classifier {
 public:
  explicit GaussianNaiveBayes(NaiveBayesParams params = {}) : params_(params) {}

  void fit(const Matrix& X, std::span<const int> y) override;
  double predict_proba(std::span<const double> x) const override;
  using Classifier::predict_proba;

  // {P(y=0|x), P(y=1|x)} via log-sum-exp.
  std::array<double, 2> posterior(std::span<const double> x) const;

  const std::array<std::vector<double>, 2>& means() const { return mean_; }
  const std::array<std::vector<double>, 2>& variances() const { return var_; }
  const std::array<double, 2>& priors() const { return prior_; }

 private:
  NaiveBayesParams params_;
  std::array<std::vector<double>, 2> mean_;
  std::array<std::vector<double>, 2> var_;
  std::array<double, 2> prior_{};
};

}  // namespace lenslevel::learn
