#include "lenslevel/learn/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lenslevel::learn {

void GaussianNaiveBayes::fit(const Matrix& X, std::span<const int> y) {
  check_training_data(X, y);
  const std::size_t d = X.cols();
  std::array<std::size_t, 2> count{};
  for (int c = 0; c < 2; ++c) {
    mean_[c].assign(d, 0.0);
    var_[c].assign(d, 0.0);
  }
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const int c = y[r] != 0;
    ++count[c];
    for (std::size_t j = 0; j < d; ++j) mean_[c][j] += X(r, j);
  }
  if (count[0] == 0 || count[1] == 0) throw Error("gaussian_nb: training data holds a single class");
  for (int c = 0; c < 2; ++c)
    for (auto& m : mean_[c]) m /= static_cast<double>(count[c]);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const int c = y[r] != 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = X(r, j) - mean_[c][j];
      var_[c][j] += dev * dev;
    }
  }
  for (int c = 0; c < 2; ++c)
    for (auto& v : var_[c]) v = std::max(v / static_cast<double>(count[c]), params_.var_floor);
  const double n = static_cast<double>(X.rows());
  prior_ = {static_cast<double>(count[0]) / n, static_cast<double>(count[1]) / n};
}

std::array<double, 2> GaussianNaiveBayes::posterior(std::span<const double> x) const {
  if (mean_[0].empty() && !x.empty()) throw Error("gaussian_nb: model is not fitted");
  std::array<double, 2> joint{};
  for (int c = 0; c < 2; ++c) {
    double lp = std::log(prior_[c]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double dev = x[j] - mean_[c][j];
      lp -= 0.5 * (std::log(2.0 * std::numbers::pi * var_[c][j]) + dev * dev / var_[c][j]);
    }
    joint[c] = lp;
  }
  const double top = std::max(joint[0], joint[1]);
  const double lse = top + std::log(std::exp(joint[0] - top) + std::exp(joint[1] - top));
  return {std::exp(joint[0] - lse), std::exp(joint[1] - lse)};
}

double GaussianNaiveBayes::predict_proba(std::span<const double> x) const { return posterior(x)[1]; }

}  // namespace lenslevel::learn
