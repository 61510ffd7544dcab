#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lenslevel/common.hpp"
#include "lenslevel/digest.hpp"
#include "lenslevel/labeler.hpp"
#include "lenslevel/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lenslevel;

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::string users, photos, comments;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "pipeline config (JSON)");
  cmd->add_option("--out", o.out, "run directory");
}

void add_inputs(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--users", o.users, "users file (JSONL or CSV)");
  cmd->add_option("--photos", o.photos, "photos file (JSONL or CSV)");
  cmd->add_option("--comments", o.comments, "comments file (JSONL or CSV)");
}

PipelineConfig load_config(const CommonOptions& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig::defaults() : PipelineConfig::load(o.config);
  if (!o.users.empty()) cfg.users = o.users;
  if (!o.photos.empty()) cfg.photos = o.photos;
  if (!o.comments.empty()) cfg.comments = o.comments;
  if (!o.out.empty()) cfg.out = o.out;
  return cfg;
}

void run_steps(const PipelineConfig& cfg, std::initializer_list<std::string_view> steps,
               std::optional<fs::path> label_source = std::nullopt) {
  Pipeline p(cfg, cfg.out);
  if (label_source) p.set_label_source(*label_source);
  for (auto step : steps) p.run_step(step);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lenslevel: identify professional photographers from multimodal photo-sharing data"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  CommonOptions o;
  auto* ingest = app.add_subcommand("ingest", "load, validate and filter users, photos and comments");
  add_common(ingest, o);
  add_inputs(ingest, o);
  auto* textprep = app.add_subcommand("textprep", "normalize comment text");
  add_common(textprep, o);
  auto* textfeat = app.add_subcommand("textfeat", "per-comment text features");
  add_common(textfeat, o);
  auto* label = app.add_subcommand("label", "ground-truth labels from occupations");
  add_common(label, o);
  label->add_option("--users", o.users, "label this users file instead of the ingested users");
  auto* featurize = app.add_subcommand("featurize", "per-user feature matrices for all seven feature sets");
  add_common(featurize, o);
  auto* evaluate = app.add_subcommand("evaluate-all", "cross-validate every model on every feature set");
  add_common(evaluate, o);
  auto* correlate = app.add_subcommand("correlate", "correlation of score and social-activity features");
  add_common(correlate, o);
  auto* characterize = app.add_subcommand("characterize", "professional vs non-professional comparison");
  add_common(characterize, o);
  bool ground_truth = false;
  characterize->add_flag("--ground-truth", ground_truth, "split classes by labels instead of model predictions");
  auto* run = app.add_subcommand("run", "every step in order, skipping those whose outputs are current");
  add_common(run, o);
  add_inputs(run, o);

  auto* train_cmd = app.add_subcommand("train", "cross-validate one model on one feature matrix");
  std::string set, model = "random_forest", features, labels, report, oof;
  std::size_t k = 10;
  std::uint64_t seed = 42;
  train_cmd->add_option("--config", o.config, "config supplying hyperparameters");
  train_cmd->add_option("--set", set, "feature set id recorded in the report");
  train_cmd->add_option("--model", model, "gaussian_nb, logistic_regression, random_forest or gradient_boosting");
  train_cmd->add_option("--k", k, "folds")->capture_default_str();
  train_cmd->add_option("--seed", seed, "seed")->capture_default_str();
  train_cmd->add_option("--features", features, "features.csv written by featurize")->required();
  train_cmd->add_option("--labels", labels, "labels.jsonl written by label")->required();
  train_cmd->add_option("--out", report, "report JSON path")->required();
  train_cmd->add_option("--oof", oof, "also write out-of-fold predictions here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  set_log_level(verbose ? LogLevel::debug : quiet ? LogLevel::warn : LogLevel::info);

  try {
    if (train_cmd->parsed()) {
      PipelineConfig cfg = o.config.empty() ? PipelineConfig::defaults() : PipelineConfig::load(o.config);
      TrainRequest req;
      req.features = features;
      req.labels = labels;
      req.spec = cfg.model_spec(learn::parse_model_kind(model));
      req.spec.seed = seed;
      req.k = k;
      req.seed = seed;
      if (!set.empty()) req.feature_set = std::string(to_string(parse_feature_set(set)));
      const learn::CvResult r = train(req);
      write_file(report, learn::to_json(r.report, &req.spec).dump(2) + "\n");
      if (!oof.empty()) {
        const FeatureMatrix m = read_feature_matrix(features);
        write_oof(oof, m, read_labels(labels).lookup(m.row_ids), r.oof_scores);
      }
      std::cout << "accuracy " << r.report.accuracy << "  auc " << r.report.auc << "  f1 " << r.report.f1 << "\n";
      return 0;
    }
    PipelineConfig cfg = load_config(o);
    if (ingest->parsed()) run_steps(cfg, {"ingest"});
    if (textprep->parsed()) run_steps(cfg, {"textprep"});
    if (textfeat->parsed()) run_steps(cfg, {"textfeat"});
    if (label->parsed()) {
      std::optional<fs::path> source;
      if (!o.users.empty()) source = fs::path(o.users);
      run_steps(cfg, {"label"}, source);
    }
    if (featurize->parsed()) run_steps(cfg, {"featurize"});
    if (evaluate->parsed()) run_steps(cfg, {"evaluate", "reports"});
    if (correlate->parsed()) run_steps(cfg, {"correlate"});
    if (characterize->parsed()) {
      if (ground_truth) cfg.characterize.labels = "ground_truth";
      run_steps(cfg, {"characterize"});
    }
    if (run->parsed()) {
      Pipeline p(cfg, cfg.out);
      p.run_all();
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "lenslevel: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lenslevel: " << e.what() << "\n";
    return 1;
  }
}
