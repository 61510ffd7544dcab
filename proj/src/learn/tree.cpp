#include "lenslevel/learn/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

namespace lenslevel::learn {

namespace {

// Impurity times node size: n*2p(1-p) for Gini, the sum of squared deviations for
// squared error. For 0/1 targets the two differ by a factor of 2, so they rank
// splits identically.
double weighted_impurity(SplitCriterion criterion, double n, double sum, double sum_sq) {
  if (n <= 0) return 0.0;
  const double mean = sum / n;
  if (criterion == SplitCriterion::gini) return 2.0 * n * mean * (1.0 - mean);
  return std::max(0.0, sum_sq - sum * mean);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

struct Frame {
  std::size_t node;
  std::size_t begin;
  std::size_t end;
  std::size_t depth;
};

}  // namespace

void DecisionTree::fit(const Matrix& X, std::span<const double> target, std::span<const std::size_t> sample_rows,
                       SplitCriterion criterion, const TreeParams& params, Rng* rng) {
  if (sample_rows.empty()) throw Error("decision tree: no training samples");
  const std::size_t d = X.cols();
  const std::size_t max_features = params.max_features == 0 ? d : std::min(params.max_features, d);
  if (max_features < d && rng == nullptr) throw Error("decision tree: feature subsampling needs an Rng");

  nodes_.clear();
  depth_ = 0;
  std::vector<std::size_t> rows(sample_rows.begin(), sample_rows.end());
  std::vector<std::size_t> features(d);
  std::vector<std::pair<double, double>> column;  // (x, target) of the node's rows

  nodes_.push_back(Node{});
  std::vector<Frame> stack{{0, 0, rows.size(), 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    depth_ = std::max(depth_, f.depth);

    double sum = 0.0, sum_sq = 0.0;
    bool pure = true;
    const double first = target[rows[f.begin]];
    for (std::size_t i = f.begin; i < f.end; ++i) {
      const double t = target[rows[i]];
      sum += t;
      sum_sq += t * t;
      pure = pure && t == first;
    }
    const std::size_t n = f.end - f.begin;
    nodes_[f.node].value = sum / static_cast<double>(n);

    const bool depth_capped = params.max_depth != 0 && f.depth >= params.max_depth;
    if (pure || depth_capped || n < params.min_samples_split) continue;

    // Candidate features: a random subset in the forest case, examined in index
    // order; more are drawn only if none of them admits a split.
    std::iota(features.begin(), features.end(), std::size_t{0});
    if (max_features < d) rng->shuffle(std::span<std::size_t>(features));

    Split best;
    std::size_t taken = 0;
    while (taken < d && best.feature < 0) {
      const std::size_t batch_end = taken == 0 ? max_features : taken + 1;
      std::vector<std::size_t> batch(features.begin() + static_cast<std::ptrdiff_t>(taken),
                                     features.begin() + static_cast<std::ptrdiff_t>(batch_end));
      std::sort(batch.begin(), batch.end());
      taken = batch_end;

      for (std::size_t feat : batch) {
        column.clear();
        for (std::size_t i = f.begin; i < f.end; ++i) column.emplace_back(X(rows[i], feat), target[rows[i]]);
        std::sort(column.begin(), column.end());
        if (column.front().first == column.back().first) continue;

        double left_sum = 0.0, left_sq = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
          left_sum += column[i].second;
          left_sq += column[i].second * column[i].second;
          if (column[i].first == column[i + 1].first) continue;
          const double nl = static_cast<double>(i + 1);
          const double nr = static_cast<double>(n - i - 1);
          const double cost = weighted_impurity(criterion, nl, left_sum, left_sq) +
                              weighted_impurity(criterion, nr, sum - left_sum, sum_sq - left_sq);
          if (cost < best.cost) {
            double thr = 0.5 * (column[i].first + column[i + 1].first);
            if (!(thr < column[i + 1].first)) thr = column[i].first;
            best = {static_cast<int>(feat), thr, cost};
          }
        }
      }
    }
    if (best.feature < 0) continue;  // every feature is constant here

    const auto mid = std::stable_partition(
        rows.begin() + static_cast<std::ptrdiff_t>(f.begin), rows.begin() + static_cast<std::ptrdiff_t>(f.end),
        [&](std::size_t r) { return X(r, static_cast<std::size_t>(best.feature)) <= best.threshold; });
    const auto split_at = static_cast<std::size_t>(mid - rows.begin());

    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{});
    const auto right = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{});
    nodes_[f.node].feature = best.feature;
    nodes_[f.node].threshold = best.threshold;
    nodes_[f.node].left = left;
    nodes_[f.node].right = right;
    stack.push_back({right, split_at, f.end, f.depth + 1});
    stack.push_back({left, f.begin, split_at, f.depth + 1});
  }
}

double DecisionTree::predict(std::span<const double> x) const {
  if (nodes_.empty()) throw Error("decision tree: not fitted");
  std::size_t i = 0;
  while (nodes_[i].feature >= 0)
    i = x[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].value;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

}  // namespace lenslevel::learn
