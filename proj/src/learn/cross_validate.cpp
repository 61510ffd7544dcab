#include "lenslevel/learn/cross_validate.hpp"

#include "lenslevel/features.hpp"
#include "lenslevel/learn/metrics.hpp"
#include "lenslevel/learn/random.hpp"

namespace lenslevel::learn {

namespace {
constexpr std::uint64_t kModelStream = 0x30DE1;
}

CvResult cross_validate(const ModelSpec& spec, const Matrix& X, std::span<const int> y, std::size_t k,
                        std::uint64_t seed, const std::string& feature_set) {
  if (X.rows() != y.size())
    throw Error("cross_validate: " + std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) + " labels");
  const FoldPlan plan = stratified_kfold(y, k, seed);

  CvResult out;
  EvalReport& r = out.report;
  r.model = spec.kind;
  r.feature_set = feature_set;
  r.k = k;
  r.seed = seed;
  r.n_rows = X.rows();
  for (int v : y) r.n_positive += v != 0;
  out.oof_scores.assign(X.rows(), 0.0);

  for (std::size_t f = 0; f < k; ++f) {
    const auto train = plan.train_rows(f);
    const auto test = plan.test_rows(f);
    Matrix X_train = X.select_rows(train);
    Matrix X_test = X.select_rows(test);
    if (spec.needs_standardization()) {
      const auto scaling = fit_scaling(X, train);
      X_train = apply_scaling(X_train, scaling);
      X_test = apply_scaling(X_test, scaling);
    }
    std::vector<int> y_train(train.size()), y_test(test.size());
    for (std::size_t i = 0; i < train.size(); ++i) y_train[i] = y[train[i]];
    for (std::size_t i = 0; i < test.size(); ++i) y_test[i] = y[test[i]];

    ModelSpec fold_spec = spec;
    fold_spec.seed = derive_seed(spec.seed, kModelStream, f);
    auto model = make_classifier(fold_spec);
    model->fit(X_train, y_train);
    const std::vector<double> scores = model->predict_proba(X_test);
    for (std::size_t i = 0; i < test.size(); ++i) out.oof_scores[test[i]] = scores[i];

    const Confusion c = confusion(scores, y_test);
    FoldMetrics m;
    m.fold = f;
    m.n_test = test.size();
    m.n_positive = c.tp + c.fn;
    m.accuracy = accuracy(c);
    m.auc = metric_auc(scores, y_test);
    m.f1 = f1_positive(c);
    m.f1_weighted = f1_weighted(c);
    r.per_fold.push_back(m);
  }
  for (const auto& m : r.per_fold) {
    r.accuracy += m.accuracy;
    r.auc += m.auc;
    r.f1 += m.f1;
    r.f1_weighted += m.f1_weighted;
  }
  const double kk = static_cast<double>(k);
  r.accuracy /= kk;
  r.auc /= kk;
  r.f1 /= kk;
  r.f1_weighted /= kk;
  return out;
}

nlohmann::ordered_json to_json(const EvalReport& r, const ModelSpec* spec) {
  nlohmann::ordered_json j;
  j["model"] = to_string(r.model);
  j["feature_set"] = r.feature_set;
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["n_rows"] = r.n_rows;
  j["n_positive"] = r.n_positive;
  if (spec != nullptr) j["hyperparameters"] = hyperparameters_json(*spec);
  j["accuracy"] = r.accuracy;
  j["auc"] = r.auc;
  j["f1"] = r.f1;
  j["f1_weighted"] = r.f1_weighted;
  auto& folds = j["per_fold"] = nlohmann::ordered_json::array();
  for (const auto& m : r.per_fold) {
    nlohmann::ordered_json f;
    f["fold"] = m.fold;
    f["n_test"] = m.n_test;
    f["n_positive"] = m.n_positive;
    f["accuracy"] = m.accuracy;
    f["auc"] = m.auc;
    f["f1"] = m.f1;
    f["f1_weighted"] = m.f1_weighted;
    folds.push_back(std::move(f));
  }
  return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.model = parse_model_kind(j.at("model").get<std::string>());
    r.feature_set = j.at("feature_set").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n_rows = j.at("n_rows").get<std::size_t>();
    r.n_positive = j.at("n_positive").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.auc = j.at("auc").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.f1_weighted = j.at("f1_weighted").get<double>();
    for (const auto& f : j.at("per_fold")) {
      FoldMetrics m;
      m.fold = f.at("fold").get<std::size_t>();
      m.n_test = f.at("n_test").get<std::size_t>();
      m.n_positive = f.at("n_positive").get<std::size_t>();
      m.accuracy = f.at("accuracy").get<double>();
      m.auc = f.at("auc").get<double>();
      m.f1 = f.at("f1").get<double>();
      m.f1_weighted = f.at("f1_weighted").get<double>();
      r.per_fold.push_back(m);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("evaluation report: ") + e.what());
  }
}

}  // namespace lenslevel::learn
