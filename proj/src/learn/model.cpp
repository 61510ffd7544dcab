#include "lenslevel/learn/model.hpp"

#include <cmath>
#include <string>

#include "lenslevel/learn/boosting.hpp"
#include "lenslevel/learn/forest.hpp"
#include "lenslevel/learn/logistic.hpp"
#include "lenslevel/learn/naive_bayes.hpp"

namespace lenslevel::learn {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::gaussian_nb: return "gaussian_nb";
    case ModelKind::logistic_regression: return "logistic_regression";
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::gradient_boosting: return "gradient_boosting";
  }
  return "unknown";
}

std::string_view display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::gaussian_nb: return "Gaussian NB";
    case ModelKind::logistic_regression: return "Logistic Regression";
    case ModelKind::random_forest: return "Random Forest";
    case ModelKind::gradient_boosting: return "Gradient Boosting";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : kAllModels)
    if (to_string(k) == name) return k;
  if (name == "nb") return ModelKind::gaussian_nb;
  if (name == "lr") return ModelKind::logistic_regression;
  if (name == "rf") return ModelKind::random_forest;
  if (name == "gbc" || name == "gb") return ModelKind::gradient_boosting;
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected gaussian_nb, logistic_regression, random_forest or gradient_boosting)");
}

nlohmann::ordered_json hyperparameters_json(const ModelSpec& spec) {
  nlohmann::ordered_json j;
  switch (spec.kind) {
    case ModelKind::gaussian_nb:
      j["var_floor"] = spec.nb.var_floor;
      break;
    case ModelKind::logistic_regression:
      j["l2"] = spec.lr.l2;
      j["tolerance"] = spec.lr.tolerance;
      j["max_iter"] = spec.lr.max_iter;
      break;
    case ModelKind::random_forest:
      j["n_trees"] = spec.rf.n_trees;
      j["max_features"] = spec.rf.max_features;
      j["bootstrap"] = spec.rf.bootstrap;
      j["max_depth"] = spec.rf.max_depth;
      j["min_samples_split"] = spec.rf.min_samples_split;
      break;
    case ModelKind::gradient_boosting:
      j["n_stages"] = spec.gb.n_stages;
      j["max_depth"] = spec.gb.max_depth;
      j["learning_rate"] = spec.gb.learning_rate;
      j["min_samples_split"] = spec.gb.min_samples_split;
      break;
  }
  return j;
}

namespace {

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("hyperparameters." + where + "." + key + ": wrong type");
  }
}

void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw ValidationError("hyperparameters." + where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ValidationError("hyperparameters." + where + ": unknown key '" + key + "'");
  }
}

}  // namespace

void apply_hyperparameters(ModelSpec& spec, const nlohmann::json& j) {
  if (j.is_null()) return;
  if (!j.is_object()) throw ValidationError("hyperparameters must be an object keyed by model name");
  for (const auto& [name, obj] : j.items()) {
    const ModelKind kind = parse_model_kind(name);
    const std::string where(to_string(kind));
    switch (kind) {
      case ModelKind::gaussian_nb:
        check_keys(obj, {"var_floor"}, where);
        if (obj.contains("var_floor")) read_field(obj, "var_floor", spec.nb.var_floor, where);
        if (!(spec.nb.var_floor > 0)) throw ValidationError("hyperparameters.gaussian_nb.var_floor must be positive");
        break;
      case ModelKind::logistic_regression:
        check_keys(obj, {"l2", "tolerance", "max_iter"}, where);
        if (obj.contains("l2")) read_field(obj, "l2", spec.lr.l2, where);
        if (obj.contains("tolerance")) read_field(obj, "tolerance", spec.lr.tolerance, where);
        if (obj.contains("max_iter")) read_field(obj, "max_iter", spec.lr.max_iter, where);
        if (spec.lr.l2 < 0) throw ValidationError("hyperparameters.logistic_regression.l2 must be non-negative");
        break;
      case ModelKind::random_forest:
        check_keys(obj, {"n_trees", "max_features", "bootstrap", "max_depth", "min_samples_split"}, where);
        if (obj.contains("n_trees")) read_field(obj, "n_trees", spec.rf.n_trees, where);
        if (obj.contains("max_features")) read_field(obj, "max_features", spec.rf.max_features, where);
        if (obj.contains("bootstrap")) read_field(obj, "bootstrap", spec.rf.bootstrap, where);
        if (obj.contains("max_depth")) read_field(obj, "max_depth", spec.rf.max_depth, where);
        if (obj.contains("min_samples_split")) read_field(obj, "min_samples_split", spec.rf.min_samples_split, where);
        if (spec.rf.n_trees == 0) throw ValidationError("hyperparameters.random_forest.n_trees must be positive");
        break;
      case ModelKind::gradient_boosting:
        check_keys(obj, {"n_stages", "max_depth", "learning_rate", "min_samples_split"}, where);
        if (obj.contains("n_stages")) read_field(obj, "n_stages", spec.gb.n_stages, where);
        if (obj.contains("max_depth")) read_field(obj, "max_depth", spec.gb.max_depth, where);
        if (obj.contains("learning_rate")) read_field(obj, "learning_rate", spec.gb.learning_rate, where);
        if (obj.contains("min_samples_split")) read_field(obj, "min_samples_split", spec.gb.min_samples_split, where);
        if (spec.gb.learning_rate < 0)
          throw ValidationError("hyperparameters.gradient_boosting.learning_rate must be non-negative");
        break;
    }
  }
}

std::vector<double> Classifier::predict_proba(const Matrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict_proba(X.row(i));
  return out;
}

std::unique_ptr<Classifier> make_classifier(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::gaussian_nb: return std::make_unique<GaussianNaiveBayes>(spec.nb);
    case ModelKind::logistic_regression: return std::make_unique<LogisticRegression>(spec.lr);
    case ModelKind::random_forest: return std::make_unique<RandomForest>(spec.rf, spec.seed);
    case ModelKind::gradient_boosting: return std::make_unique<GradientBoosting>(spec.gb);
  }
  throw Error("make_classifier: unknown model kind");
}

void check_training_data(const Matrix& X, std::span<const int> y) {
  if (X.rows() == 0) throw ValidationError("training data is empty");
  if (X.rows() != y.size())
    throw ValidationError("training data: " + std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) + " labels");
  for (int v : y)
    if (v != 0 && v != 1) throw ValidationError("training labels must be 0 or 1");
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (double v : X.row(i))
      if (!std::isfinite(v)) throw ValidationError("training data holds a non-finite value in row " + std::to_string(i));
}

}  // namespace lenslevel::learn
