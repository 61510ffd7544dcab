#pragma once

#include <cstddef>
#include <span>

namespace lenslevel::learn {

inline constexpr double kDecisionThreshold = 0.5;

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

// Predicted positive iff score > threshold (a tie stays negative).
Confusion confusion(std::span<const double> scores, std::span<const int> y, double threshold = kDecisionThreshold);

double accuracy(const Confusion& c);
// F1 of the positive class; 0 when there is no true positive.
double f1_positive(const Confusion& c);
// Support-weighted mean of the per-class F1 scores.
double f1_weighted(const Confusion& c);

double metric_accuracy(std::span<const double> scores, std::span<const int> y, double threshold = kDecisionThreshold);
double metric_f1(std::span<const double> scores, std::span<const int> y, double threshold = kDecisionThreshold);

// Mann-Whitney AUC: share of (positive, negative) pairs ranked correctly, ties count
// one half. Throws if y holds a single class.
double metric_auc(std::span<const double> scores, std::span<const int> y);

}  // namespace lenslevel::learn
