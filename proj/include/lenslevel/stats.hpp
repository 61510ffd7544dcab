#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lenslevel/common.hpp"
#include "lenslevel/features.hpp"

namespace lenslevel::stats {

inline constexpr double kAlpha = 0.05;

struct CorrelationMatrix {
  std::vector<std::string> column_names;
  Matrix r;
};

// Pearson r; 0 if either side is constant.
double pearson(std::span<const double> x, std::span<const double> y);
// Pairwise Pearson over the columns of m; constant columns are logged. Needs >= 2 rows.
CorrelationMatrix pearson_matrix(const Matrix& m, std::vector<std::string> column_names);

struct TestResult {
  double statistic = 0.0;  // F; +inf when groups separate with zero within-group spread
  double p_value = 1.0;
  double df1 = 0.0;
  double df2 = 0.0;
  bool significant = false;  // p < kAlpha
};

// P(F(d1, d2) > f) via the regularized incomplete beta function.
double f_survival(double f, double d1, double d2);

// Two-group one-way ANOVA; groups holds 0/1 per value and each group needs >= 2 members.
TestResult anova_oneway(std::span<const double> values, std::span<const int> groups);

struct ManovaResult {
  TestResult test;
  double t_squared = 0.0;
  double wilks_lambda = 1.0;
  double ridge = 0.0;  // added to the diagonal of the scaled pooled covariance; 0 if not needed
};

// Two-group MANOVA through Hotelling's T^2 and its exact F transform.
// The pooled covariance is rescaled to unit diagonal before solving; a ridge of
// 1e-8 * trace / p is added only when it is not numerically positive definite.
ManovaResult manova_two_group(const Matrix& m, std::span<const int> groups);

struct FeatureComparison {
  std::string feature;
  double mean_professional = 0.0;
  double mean_non_professional = 0.0;
  TestResult anova;
};

struct CharacterizationReport {
  std::string label_source;  // "predicted" or "ground_truth"
  std::string prediction_source;  // model and feature set behind predicted classes
  std::string feature_set;
  std::size_t n_professional = 0;
  std::size_t n_non_professional = 0;
  std::vector<FeatureComparison> features;
  ManovaResult manova;
};

// classes holds 0/1 per row of m (1: professional). Throws if a class is empty.
CharacterizationReport characterize(std::span<const int> classes, const FeatureMatrix& m, std::string label_source);

void write_correlation_csv(const std::filesystem::path& path, const CorrelationMatrix& c);
// One row per cell (row, column, r) for heatmap plotting.
void write_correlation_long_csv(const std::filesystem::path& path, const CorrelationMatrix& c);
void write_anova_csv(const std::filesystem::path& path, const CharacterizationReport& r);
// feature, class, mean rows for bar plots.
void write_characterization_bars_csv(const std::filesystem::path& path, const CharacterizationReport& r);
nlohmann::ordered_json to_json(const CharacterizationReport& r);
std::string to_markdown(const CharacterizationReport& r);

// Fixed-format number for reports: shortest round-trip text; "inf" for +infinity.
std::string format_number(double v);

}  // namespace lenslevel::stats
