#pragma once

#include <vector>

#include "lenslevel/learn/model.hpp"

namespace lenslevel::learn {

double sigmoid(double z);

// Penalised log-likelihood
//   sum_i [y_i log p_i + (1 - y_i) log(1 - p_i)] - (l2 / 2) ||w||^2,
// with p_i = sigmoid(w.x_i + b); the intercept b is not penalised.
double logistic_objective(const Matrix& X, std::span<const int> y, std::span<const double> w, double b, double l2);

// Gradient of logistic_objective: d entries for w followed by one for b.
std::vector<double> logistic_gradient(const Matrix& X, std::span<const int> y, std::span<const double> w, double b,
                                      double l2);

// L2-regularised logistic regression fitted by batch gradient ascent with an
// adaptive step: a step is accepted only if it raises the objective.
class LogisticRegression final : public Classifier {
 public:
  explicit LogisticRegression(LogisticParams params = {}) : params_(params) {}

  void fit(const Matrix& X, std::span<const int> y) override;
  double predict_proba(std::span<const double> x) const override;
  using Classifier::predict_proba;

  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }
  std::size_t iterations() const { return iterations_; }
  bool converged() const { return converged_; }
  // Objective after each accepted step (first entry: the all-zero start).
  const std::vector<double>& objective_trace() const { return trace_; }

 private:
  LogisticParams params_;
  std::vector<double> w_;
  double b_ = 0.0;
  std::size_t iterations_ = 0;
  bool converged_ = false;
  std::vector<double> trace_;
};

}  // namespace lenslevel::learn
