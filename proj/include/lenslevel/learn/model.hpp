#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lenslevel/common.hpp"

namespace lenslevel::learn {

enum class ModelKind { gaussian_nb, logistic_regression, random_forest, gradient_boosting };

inline constexpr ModelKind kAllModels[] = {ModelKind::gaussian_nb, ModelKind::logistic_regression,
                                           ModelKind::random_forest, ModelKind::gradient_boosting};

std::string_view to_string(ModelKind kind);
std::string_view display_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);  // throws ValidationError

struct NaiveBayesParams {
  double var_floor = 1e-9;
};

struct LogisticParams {
  double l2 = 1.0;
  double tolerance = 1e-6;  // on the max-norm of the gradient
  std::size_t max_iter = 1000;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0: floor(sqrt(d)), at least 1
  bool bootstrap = true;
  std::size_t max_depth = 0;     // 0: unlimited
  std::size_t min_samples_split = 2;
};

struct BoostingParams {
  std::size_t n_stages = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  std::size_t min_samples_split = 2;
};

struct ModelSpec {
  ModelKind kind = ModelKind::random_forest;
  NaiveBayesParams nb;
  LogisticParams lr;
  ForestParams rf;
  BoostingParams gb;
  std::uint64_t seed = 0;

  // Only logistic regression is fitted on z-scored features.
  bool needs_standardization() const { return kind == ModelKind::logistic_regression; }
};

// Hyperparameters of one kind, keyed like the config file.
nlohmann::ordered_json hyperparameters_json(const ModelSpec& spec);
// Overrides fields present in `j` (an object keyed by model kind name).
void apply_hyperparameters(ModelSpec& spec, const nlohmann::json& j);

class Classifier {
 public:
  virtual ~Classifier() = default;

  // y holds 0/1 labels, one per row of X.
  virtual void fit(const Matrix& X, std::span<const int> y) = 0;
  // P(label = 1 | x).
  virtual double predict_proba(std::span<const double> x) const = 0;

  std::vector<double> predict_proba(const Matrix& X) const;
};

std::unique_ptr<Classifier> make_classifier(const ModelSpec& spec);

// Shared precondition checks: matching sizes, non-empty, finite values, 0/1 labels.
void check_training_data(const Matrix& X, std::span<const int> y);

}  // namespace lenslevel::learn
