#include "lenslevel/learn/forest.hpp"

#include <cmath>
#include <numeric>

namespace lenslevel::learn {

namespace {
constexpr std::uint64_t kTreeStream = 0x7EE5;
}

void RandomForest::fit(const Matrix& X, std::span<const int> y) {
  check_training_data(X, y);
  if (params_.n_trees == 0) throw ValidationError("random_forest: n_trees must be positive");
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();

  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = y[i] != 0 ? 1.0 : 0.0;

  TreeParams tp;
  tp.max_depth = params_.max_depth;
  tp.min_samples_split = params_.min_samples_split;
  tp.max_features = params_.max_features != 0
                        ? params_.max_features
                        : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));

  trees_.assign(params_.n_trees, DecisionTree{});
  std::vector<std::size_t> sample(n);
  for (std::size_t t = 0; t < params_.n_trees; ++t) {
    Rng rng(derive_seed(seed_, kTreeStream, t));
    if (params_.bootstrap) {
      for (auto& s : sample) s = rng.uniform_index(n);
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    trees_[t].fit(X, target, sample, SplitCriterion::gini, tp, &rng);
  }
}

double RandomForest::predict_proba(std::span<const double> x) const {
  if (trees_.empty()) throw Error("random_forest: model is not fitted");
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(x);
  return sum / static_cast<double>(trees_.size());
}

}  // namespace lenslevel::learn
