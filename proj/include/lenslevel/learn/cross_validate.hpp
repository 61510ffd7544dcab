#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lenslevel/common.hpp"
#include "lenslevel/learn/folds.hpp"
#include "lenslevel/learn/model.hpp"

namespace lenslevel::learn {

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t n_test = 0;
  std::size_t n_positive = 0;
  double accuracy = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
  double f1_weighted = 0.0;

  friend bool operator==(const FoldMetrics&, const FoldMetrics&) = default;
};

// Fold means are unweighted.
struct EvalReport {
  ModelKind model = ModelKind::random_forest;
  std::string feature_set;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t n_rows = 0;
  std::size_t n_positive = 0;
  double accuracy = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
  double f1_weighted = 0.0;
  std::vector<FoldMetrics> per_fold;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct CvResult {
  EvalReport report;
  std::vector<double> oof_scores;  // held-out score of every row
};

// Per fold: fit on the other k-1 folds (z-scored with training-fold statistics when
// the model needs it), score the held-out fold. Fold f's model uses a seed derived
// from (spec.seed, f).
CvResult cross_validate(const ModelSpec& spec, const Matrix& X, std::span<const int> y, std::size_t k,
                        std::uint64_t seed, const std::string& feature_set = {});

nlohmann::ordered_json to_json(const EvalReport& r, const ModelSpec* spec = nullptr);
EvalReport eval_report_from_json(const nlohmann::json& j);

}  // namespace lenslevel::learn
