#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lenslevel/learn/boosting.hpp"
#include "lenslevel/learn/forest.hpp"
#include "lenslevel/learn/logistic.hpp"
#include "lenslevel/learn/metrics.hpp"
#include "lenslevel/learn/naive_bayes.hpp"
#include "lenslevel/learn/tree.hpp"
#include "oracles.hpp"

using namespace lenslevel;
using namespace lenslevel::learn;

namespace {

Matrix column(std::vector<double> v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

struct Data {
  Matrix X;
  std::vector<int> y;
};

Data synth_data(std::mt19937_64& rng, std::size_t n, std::size_t d, double signal = 1.0) {
  Data out{Matrix(n, d), std::vector<int>(n)};
  std::normal_distribution<double> nd(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.y[i] = static_cast<int>(rng() % 2);
    for (std::size_t j = 0; j < d; ++j) out.X(i, j) = nd(rng) + (out.y[i] ? signal * (j % 2 ? 1.0 : -0.5) : 0.0);
  }
  out.y[0] = 0;
  out.y[1] = 1;
  return out;
}

std::vector<std::vector<double>> rows_of(const Matrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

// Brute-force best Gini stump: every feature, every midpoint, first strict minimum.
double stump_oracle(const Matrix& X, const std::vector<int>& y, std::span<const double> x) {
  const std::size_t n = X.rows();
  auto gini = [](double pos, double cnt) { return cnt == 0 ? 0.0 : 2.0 * cnt * (pos / cnt) * (1.0 - pos / cnt); };
  double total_pos = 0;
  for (int v : y) total_pos += v;
  double best = gini(total_pos, static_cast<double>(n));
  int best_f = -1;
  double best_t = 0;
  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < n; ++i) vals.push_back(X(i, f));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      const double t = vals[k] + (vals[k + 1] - vals[k]) / 2.0;
      double lp = 0, lc = 0, rp = 0, rc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (X(i, f) <= t) {
          lp += y[i];
          lc += 1;
        } else {
          rp += y[i];
          rc += 1;
        }
      }
      const double cost = gini(lp, lc) + gini(rp, rc);
      if (cost < best - 1e-12) {
        best = cost;
        best_f = static_cast<int>(f);
        best_t = t;
      }
    }
  }
  double sp = 0, sc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_f < 0 || (X(i, static_cast<std::size_t>(best_f)) <= best_t) ==
                          (x[static_cast<std::size_t>(best_f)] <= best_t)) {
      sp += y[i];
      sc += 1;
    }
  }
  return sp / sc;
}

}  // namespace

TEST_SUITE("learners") {
  TEST_CASE("naive bayes hand posterior") {
    GaussianNaiveBayes nb;
    nb.fit(column({0, 2, 4, 6}), std::vector<int>{0, 0, 1, 1});
    const std::vector<double> x{1.0};
    CHECK(nb.predict_proba(x) == doctest::Approx(1.0 / (1.0 + std::exp(8.0))).epsilon(1e-9));
    CHECK(nb.predict_proba(std::vector<double>{3.0}) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(nb.predict_proba(std::vector<double>{2.9}) < 0.5);
    CHECK(nb.predict_proba(std::vector<double>{3.1}) > 0.5);
    CHECK(nb.priors()[1] == 0.5);
    CHECK(nb.variances()[0][0] == 1.0);
  }

  TEST_CASE("naive bayes posteriors sum to one and survive constant features") {
    std::mt19937_64 rng(61);
    auto d = synth_data(rng, 80, 4);
    for (std::size_t i = 0; i < 80; ++i) d.X(i, 2) = 7.0;
    GaussianNaiveBayes nb;
    nb.fit(d.X, d.y);
    CHECK(nb.variances()[0][2] == 1e-9);
    for (std::size_t i = 0; i < 80; ++i) {
      const auto post = nb.posterior(d.X.row(i));
      CHECK(post[0] + post[1] == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::isfinite(post[1]));
    }
    CHECK_THROWS(nb.fit(column({1, 2}), std::vector<int>{1, 1}));
  }

  TEST_CASE("naive bayes predictions are invariant to per-feature affine rescaling") {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 20; ++trial) {
      auto d = synth_data(rng, 60, 3);
      Matrix scaled = d.X;
      const std::vector<double> a{2.5, 0.01, 40.0}, b{-3.0, 100.0, 0.5};
      for (std::size_t i = 0; i < 60; ++i)
        for (std::size_t j = 0; j < 3; ++j) scaled(i, j) = a[j] * d.X(i, j) + b[j];
      GaussianNaiveBayes n1, n2;
      n1.fit(d.X, d.y);
      n2.fit(scaled, d.y);
      for (std::size_t i = 0; i < 60; ++i) {
        const double p1 = n1.predict_proba(d.X.row(i)), p2 = n2.predict_proba(scaled.row(i));
        if (std::abs(p1 - 0.5) > 1e-6) CHECK((p1 > 0.5) == (p2 > 0.5));
      }
    }
  }

  TEST_CASE("logistic zero weights give one half") {
    LogisticParams p;
    p.max_iter = 0;
    LogisticRegression lr(p);
    std::mt19937_64 rng(63);
    auto d = synth_data(rng, 20, 3);
    lr.fit(d.X, d.y);
    for (std::size_t i = 0; i < 20; ++i) CHECK(lr.predict_proba(d.X.row(i)) == 0.5);
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(sigmoid(800.0) <= 1.0);
  }

  TEST_CASE("logistic objective and gradient match independent computations") {
    std::mt19937_64 rng(64);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      auto d = synth_data(rng, 25, 4);
      std::vector<double> w(4);
      for (auto& v : w) v = nd(rng);
      const double b = nd(rng);
      const double l2 = 0.5 + static_cast<double>(rng() % 3);
      const double f = logistic_objective(d.X, d.y, w, b, l2);
      CHECK(f == doctest::Approx(oracle::logistic_objective(rows_of(d.X), d.y, w, b, l2)).epsilon(1e-10));
      const auto g = logistic_gradient(d.X, d.y, w, b, l2);
      REQUIRE(g.size() == 5);
      const double h = 1e-5;
      for (std::size_t j = 0; j < 5; ++j) {
        auto wp = w, wm = w;
        double bp = b, bm = b;
        if (j < 4) {
          wp[j] += h;
          wm[j] -= h;
        } else {
          bp += h;
          bm -= h;
        }
        const double fd = (logistic_objective(d.X, d.y, wp, bp, l2) - logistic_objective(d.X, d.y, wm, bm, l2)) / (2 * h);
        CHECK(std::abs(fd - g[j]) <= 1e-5 * std::max(1.0, std::abs(g[j])));
      }
    }
  }

  TEST_CASE("logistic fit reaches a stationary point with a monotone objective") {
    std::mt19937_64 rng(65);
    auto d = synth_data(rng, 120, 3);
    LogisticRegression lr;
    lr.fit(d.X, d.y);
    CHECK(lr.converged());
    const auto g = logistic_gradient(d.X, d.y, lr.weights(), lr.bias(), 1.0);
    for (double v : g) CHECK(std::abs(v) <= 1e-6);
    const auto& trace = lr.objective_trace();
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] > trace[i - 1]);

    LogisticRegression two;
    two.fit(column({-1.0, 1.0}), std::vector<int>{0, 1});
    const auto& t2 = two.objective_trace();
    for (std::size_t i = 1; i < t2.size(); ++i) CHECK(t2[i] > t2[i - 1]);
    CHECK(two.predict_proba(std::vector<double>{1.0}) > 0.5);

    Matrix bad = column({0.0, std::numeric_limits<double>::quiet_NaN()});
    CHECK_THROWS_AS(lr.fit(bad, std::vector<int>{0, 1}), ValidationError);
  }

  TEST_CASE("depth-1 gini tree equals the brute-force stump") {
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 4 + rng() % 30, d = 1 + rng() % 4;
      Matrix X(n, d);
      std::vector<int> y(n);
      std::vector<double> target(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) X(i, j) = static_cast<double>(rng() % 6);
        y[i] = static_cast<int>(rng() % 2);
        target[i] = y[i];
      }
      std::vector<std::size_t> rows(n);
      std::iota(rows.begin(), rows.end(), 0);
      TreeParams p;
      p.max_depth = 1;
      DecisionTree tree;
      tree.fit(X, target, rows, SplitCriterion::gini, p);
      for (std::size_t i = 0; i < n; ++i) CHECK(tree.predict(X.row(i)) == doctest::Approx(stump_oracle(X, y, X.row(i))));
    }
  }

  TEST_CASE("regression tree leaves hold the mean target") {
    const Matrix X = column({1, 2, 3, 10, 11, 12});
    const std::vector<double> target{1, 2, 3, 10, 20, 30};
    std::vector<std::size_t> rows(6);
    std::iota(rows.begin(), rows.end(), 0);
    TreeParams p;
    p.max_depth = 1;
    DecisionTree tree;
    tree.fit(X, target, rows, SplitCriterion::squared_error, p);
    CHECK(tree.leaf_count() == 2);
    // {1,2,3,10} | {20,30} leaves SSE 50 + 50, below the 2 + 200 of the split at 6.5.
    CHECK(tree.predict(std::vector<double>{0.0}) == doctest::Approx(4.0));
    CHECK(tree.predict(std::vector<double>{10.5}) == doctest::Approx(4.0));
    CHECK(tree.predict(std::vector<double>{10.6}) == doctest::Approx(25.0));
  }

  TEST_CASE("random forest memorizes distinct training rows") {
    std::mt19937_64 rng(67);
    auto d = synth_data(rng, 200, 5, 0.3);
    RandomForest rf({}, 7);
    rf.fit(d.X, d.y);
    CHECK(metric_accuracy(rf.predict_proba(d.X), d.y) >= 0.99);
  }

  TEST_CASE("one tree without bootstrap over all features is a decision tree") {
    std::mt19937_64 rng(68);
    auto d = synth_data(rng, 80, 4, 0.5);
    ForestParams fp;
    fp.n_trees = 1;
    fp.bootstrap = false;
    fp.max_features = 4;
    RandomForest rf(fp, 3);
    rf.fit(d.X, d.y);
    std::vector<double> target(d.y.begin(), d.y.end());
    std::vector<std::size_t> rows(80);
    std::iota(rows.begin(), rows.end(), 0);
    DecisionTree tree;
    tree.fit(d.X, target, rows, SplitCriterion::gini, TreeParams{});
    auto probe = synth_data(rng, 50, 4, 0.5);
    for (std::size_t i = 0; i < 50; ++i) CHECK(rf.predict_proba(probe.X.row(i)) == tree.predict(probe.X.row(i)));
  }

  TEST_CASE("random forest determinism and tree averaging") {
    std::mt19937_64 rng(69);
    auto d = synth_data(rng, 100, 6, 0.4);
    auto probe = synth_data(rng, 40, 6, 0.4);
    ForestParams fp;
    fp.n_trees = 25;
    std::vector<std::vector<double>> runs;
    for (int i = 0; i < 3; ++i) {
      RandomForest rf(fp, 11);
      rf.fit(d.X, d.y);
      runs.push_back(rf.predict_proba(probe.X));
      if (i == 0) {
        for (std::size_t r = 0; r < 40; ++r) {
          double sum = 0.0;
          for (const auto& t : rf.trees()) sum += t.predict(probe.X.row(r));
          CHECK(runs[0][r] == doctest::Approx(sum / 25.0).epsilon(1e-15));
          CHECK(runs[0][r] >= 0.0);
          CHECK(runs[0][r] <= 1.0);
        }
      }
    }
    CHECK(runs[0] == runs[1]);
    CHECK(runs[1] == runs[2]);
    RandomForest other(fp, 12);
    other.fit(d.X, d.y);
    CHECK(other.predict_proba(probe.X) != runs[0]);
  }

  TEST_CASE("boosting with no stages or zero learning rate predicts the base rate") {
    std::mt19937_64 rng(70);
    auto d = synth_data(rng, 50, 3);
    const double rate = static_cast<double>(std::count(d.y.begin(), d.y.end(), 1)) / 50.0;
    BoostingParams p;
    p.n_stages = 0;
    GradientBoosting g0(p);
    g0.fit(d.X, d.y);
    CHECK(g0.initial_score() == doctest::Approx(std::log(rate / (1 - rate))));
    p.n_stages = 20;
    p.learning_rate = 0.0;
    GradientBoosting glr0(p);
    glr0.fit(d.X, d.y);
    auto probe = synth_data(rng, 30, 3);
    for (std::size_t i = 0; i < 30; ++i) {
      CHECK(g0.predict_proba(probe.X.row(i)) == doctest::Approx(rate).epsilon(1e-12));
      CHECK(glr0.predict_proba(probe.X.row(i)) == doctest::Approx(rate).epsilon(1e-12));
    }
  }

  TEST_CASE("boosting training loss never increases") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 5; ++trial) {
      auto d = synth_data(rng, 50, 3, 0.3);
      GradientBoosting gb;
      gb.fit(d.X, d.y);
      const auto& loss = gb.train_loss();
      REQUIRE(loss.size() == 101);
      for (std::size_t i = 1; i < loss.size(); ++i) CHECK(loss[i] <= loss[i - 1] + 1e-12);
      std::vector<double> z;
      for (std::size_t i = 0; i < 50; ++i) z.push_back(gb.decision_function(d.X.row(i)));
      CHECK(mean_log_loss(z, d.y) == doctest::Approx(loss.back()).epsilon(1e-12));
    }
  }

  TEST_CASE("boosting fits a four-point xor") {
    Matrix X(4, 2);
    const double pts[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (std::size_t i = 0; i < 4; ++i) {
      X(i, 0) = pts[i][0];
      X(i, 1) = pts[i][1];
    }
    const std::vector<int> y{0, 1, 1, 0};
    GradientBoosting gb;
    gb.fit(X, y);
    CHECK(metric_accuracy(gb.predict_proba(X), y) == 1.0);
  }

  TEST_CASE("boosting rejects single-class data and bad parameters") {
    CHECK_THROWS(GradientBoosting().fit(column({1, 2, 3}), std::vector<int>{1, 1, 1}));
    BoostingParams p;
    p.learning_rate = -0.1;
    CHECK_THROWS_AS(GradientBoosting(p).fit(column({1, 2}), std::vector<int>{0, 1}), ValidationError);
  }

  TEST_CASE("model factory and hyperparameter overrides") {
    ModelSpec spec;
    spec.kind = ModelKind::gradient_boosting;
    apply_hyperparameters(spec, nlohmann::json::parse(R"({"gradient_boosting": {"n_stages": 7, "learning_rate": 0.3}})"));
    CHECK(spec.gb.n_stages == 7);
    CHECK(spec.gb.learning_rate == 0.3);
    CHECK_THROWS_AS(apply_hyperparameters(spec, nlohmann::json::parse(R"({"gradient_boosting": {"depth": 2}})")),
                    ValidationError);
    CHECK(parse_model_kind("rf") == ModelKind::random_forest);
    CHECK(parse_model_kind("logistic_regression") == ModelKind::logistic_regression);
    CHECK_THROWS_AS(parse_model_kind("svm"), ValidationError);
    for (auto kind : kAllModels) {
      spec.kind = kind;
      CHECK(make_classifier(spec) != nullptr);
      CHECK(parse_model_kind(to_string(kind)) == kind);
    }
  }
}
