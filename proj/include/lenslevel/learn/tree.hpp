#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lenslevel/common.hpp"
#include "lenslevel/learn/random.hpp"

namespace lenslevel::learn {

enum class SplitCriterion { gini, squared_error };

struct TreeParams {
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // 0: all features
};

// CART tree over a numeric target. With the Gini criterion the target is a 0/1
// label and leaves hold the positive-class frequency; with squared error leaves
// hold the mean target. Splits are "x <= threshold" at midpoints between
// consecutive distinct values; ties go to the lowest feature index, then the
// lowest threshold.
class DecisionTree {
 public:
  // sample_rows may repeat rows (bootstrap). rng is required when
  // params.max_features restricts the candidate features.
  void fit(const Matrix& X, std::span<const double> target, std::span<const std::size_t> sample_rows,
           SplitCriterion criterion, const TreeParams& params, Rng* rng = nullptr);

  double predict(std::span<const double> x) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const;
  std::size_t depth() const { return depth_; }

 private:
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0;
  };
  std::vector<Node> nodes_;
  std::size_t depth_ = 0;
};

}  // namespace lenslevel::learn
