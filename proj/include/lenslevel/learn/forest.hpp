#pragma once

#include <vector>

#include "lenslevel/learn/model.hpp"
#include "lenslevel/learn/tree.hpp"

namespace lenslevel::learn {

// Bagged Gini trees with per-split feature subsampling. Tree t draws from its own
// stream derived from (seed, t).
class RandomForest final : public Classifier {
 public:
  explicit RandomForest(ForestParams params = {}, std::uint64_t seed = 0) : params_(params), seed_(seed) {}

  void fit(const Matrix& X, std::span<const int> y) override;
  // Mean of the per-tree leaf positive frequencies.
  double predict_proba(std::span<const double> x) const override;
  using Classifier::predict_proba;

  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  ForestParams params_;
  std::uint64_t seed_;
  std::vector<DecisionTree> trees_;
};

}  // namespace lenslevel::learn
