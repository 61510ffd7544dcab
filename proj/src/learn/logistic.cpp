#include "lenslevel/learn/logistic.hpp"

#include <algorithm>
#include <cmath>

namespace lenslevel::learn {

namespace {

double linear(std::span<const double> x, std::span<const double> w, double b) {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
  return z;
}

// log(sigmoid(z)) without overflow.
double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_objective(const Matrix& X, std::span<const int> y, std::span<const double> w, double b, double l2) {
  double ll = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double z = linear(X.row(i), w, b);
    ll += y[i] != 0 ? log_sigmoid(z) : log_sigmoid(-z);
  }
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  return ll - 0.5 * l2 * norm2;
}

std::vector<double> logistic_gradient(const Matrix& X, std::span<const int> y, std::span<const double> w, double b,
                                      double l2) {
  const std::size_t d = X.cols();
  std::vector<double> g(d + 1, 0.0);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto x = X.row(i);
    const double r = (y[i] != 0 ? 1.0 : 0.0) - sigmoid(linear(x, w, b));
    for (std::size_t j = 0; j < d; ++j) g[j] += r * x[j];
    g[d] += r;
  }
  for (std::size_t j = 0; j < d; ++j) g[j] -= l2 * w[j];
  return g;
}

void LogisticRegression::fit(const Matrix& X, std::span<const int> y) {
  check_training_data(X, y);
  const std::size_t d = X.cols();
  w_.assign(d, 0.0);
  b_ = 0.0;
  iterations_ = 0;
  converged_ = false;

  // 1/L for L = ||[X 1]||_F^2 / 4 + l2 bounds the Hessian, so the first step always ascends.
  double frob = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (double v : X.row(i)) frob += v * v;
    frob += 1.0;
  }
  double step = 1.0 / (0.25 * frob + params_.l2);

  double objective = logistic_objective(X, y, w_, b_, params_.l2);
  trace_.assign(1, objective);
  std::vector<double> grad = logistic_gradient(X, y, w_, b_, params_.l2);

  std::vector<double> w_try(d);
  while (iterations_ < params_.max_iter) {
    if (max_abs(grad) < params_.tolerance) {
      converged_ = true;
      break;
    }
    ++iterations_;
    // Backtrack until the objective strictly improves.
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      for (std::size_t j = 0; j < d; ++j) w_try[j] = w_[j] + step * grad[j];
      const double b_try = b_ + step * grad[d];
      const double next = logistic_objective(X, y, w_try, b_try, params_.l2);
      if (next > objective) {
        w_.swap(w_try);
        b_ = b_try;
        objective = next;
        accepted = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable improvement left
    trace_.push_back(objective);
    grad = logistic_gradient(X, y, w_, b_, params_.l2);
  }
  if (!converged_ && max_abs(grad) < params_.tolerance) converged_ = true;
}

double LogisticRegression::predict_proba(std::span<const double> x) const { return sigmoid(linear(x, w_, b_)); }

}  // namespace lenslevel::learn
