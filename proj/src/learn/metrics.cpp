#include "lenslevel/learn/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lenslevel/common.hpp"

namespace lenslevel::learn {

namespace {

void check_sizes(std::span<const double> scores, std::span<const int> y) {
  if (scores.size() != y.size()) throw Error("metric: scores and labels differ in length");
  if (scores.empty()) throw Error("metric: empty input");
}

double f1_from(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

Confusion confusion(std::span<const double> scores, std::span<const int> y, double threshold) {
  check_sizes(scores, y);
  Confusion c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool pred = scores[i] > threshold;
    const bool truth = y[i] != 0;
    if (pred && truth) ++c.tp;
    else if (pred && !truth) ++c.fp;
    else if (!pred && truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double accuracy(const Confusion& c) {
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double f1_positive(const Confusion& c) { return f1_from(c.tp, c.fp, c.fn); }

double f1_weighted(const Confusion& c) {
  const double pos = static_cast<double>(c.tp + c.fn);
  const double neg = static_cast<double>(c.tn + c.fp);
  const double f1_neg = f1_from(c.tn, c.fn, c.fp);
  return (pos * f1_positive(c) + neg * f1_neg) / (pos + neg);
}

double metric_accuracy(std::span<const double> scores, std::span<const int> y, double threshold) {
  return accuracy(confusion(scores, y, threshold));
}

double metric_f1(std::span<const double> scores, std::span<const int> y, double threshold) {
  return f1_positive(confusion(scores, y, threshold));
}

double metric_auc(std::span<const double> scores, std::span<const int> y) {
  check_sizes(scores, y);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the positive rank sum, with tied groups sharing their mid-rank.
  std::uint64_t rank2_pos = 0;
  std::uint64_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t mid2 = i + j + 1;  // 2 * mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (y[order[t]] != 0) {
        rank2_pos += mid2;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::uint64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("AUC is undefined when labels contain a single class");
  // 2U = 2*R_pos - n_pos*(n_pos+1): twice the number of correctly ordered pairs.
  const std::uint64_t u2 = rank2_pos - n_pos * (n_pos + 1);
  return static_cast<double>(u2) / static_cast<double>(2 * n_pos * n_neg);
}

}  // namespace lenslevel::learn
