#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lenslevel/dataset.hpp"
#include "lenslevel/features.hpp"
#include "lenslevel/learn/cross_validate.hpp"
#include "lenslevel/learn/model.hpp"

namespace lenslevel {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct DataFiles {
  std::filesystem::path lexicon;
  std::filesystem::path stopwords;
  std::filesystem::path emoji;
  std::filesystem::path easy_words;
};

struct CharacterizeConfig {
  std::string labels = "predicted";  // or "ground_truth"
  learn::ModelKind model = learn::ModelKind::random_forest;
  FeatureSetId feature_set = FeatureSetId::user_photo;  // whose out-of-fold predictions are used
  FeatureSetId matrix = FeatureSetId::all;              // the columns being compared
};

struct PipelineConfig {
  std::filesystem::path users;
  std::filesystem::path photos;
  std::filesystem::path comments;
  std::filesystem::path out;
  SnapshotConfig snapshot;
  bool apply_activity_filter = true;
  bool apply_trim = true;
  std::uint64_t seed = 42;
  std::size_t k = 10;
  std::vector<learn::ModelKind> models{std::begin(learn::kAllModels), std::end(learn::kAllModels)};
  std::vector<FeatureSetId> feature_sets{kAllFeatureSets.begin(), kAllFeatureSets.end()};
  nlohmann::json hyperparameters = nlohmann::json::object();
  learn::ModelKind group_model = learn::ModelKind::random_forest;
  CharacterizeConfig characterize;
  DataFiles data;
  double reading_seconds_per_char = 0.01469;
  bool zero_comment_photos_as_zero = true;

  // Relative paths in `j` resolve against base_dir. Unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig defaults();

  // Every setting except file locations, in a canonical order.
  nlohmann::ordered_json settings_json() const;
  learn::ModelSpec model_spec(learn::ModelKind kind) const;
  void validate() const;
};

// Steps in execution order.
inline constexpr std::array<std::string_view, 9> kSteps{"ingest",   "textprep",  "textfeat",     "label",  "featurize",
                                                        "evaluate", "correlate", "characterize", "reports"};

struct StepOutcome {
  std::string step;
  bool cached = false;
};

// A run directory: step outputs in per-step subdirectories plus manifest.json.
// A step is skipped when its key (a digest of its settings and input digests)
// matches the manifest and its recorded outputs are intact.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, std::filesystem::path out_dir);

  StepOutcome run_step(std::string_view step);
  std::vector<StepOutcome> run_all();

  // Label a users file directly instead of the ingested users.
  void set_label_source(std::filesystem::path users_file) { label_source_ = std::move(users_file); }

  const nlohmann::ordered_json& manifest() const { return manifest_; }
  const std::filesystem::path& out_dir() const { return out_; }

 private:
  nlohmann::ordered_json step_settings(std::string_view step) const;
  std::vector<std::pair<std::string, std::string>> step_inputs(std::string_view step) const;
  bool step_current(std::string_view step, const std::string& key) const;
  std::vector<std::string> execute(std::string_view step);
  std::string upstream_digest(std::string_view step, const std::string& rel) const;
  void write_manifest();
  void append_run_log(const StepOutcome& outcome, double seconds);

  std::vector<std::string> do_ingest();
  std::vector<std::string> do_textprep();
  std::vector<std::string> do_textfeat();
  std::vector<std::string> do_label();
  std::vector<std::string> do_featurize();
  std::vector<std::string> do_evaluate();
  std::vector<std::string> do_correlate();
  std::vector<std::string> do_characterize();
  std::vector<std::string> do_reports();

  PipelineConfig cfg_;
  std::filesystem::path out_;
  std::optional<std::filesystem::path> label_source_;
  nlohmann::ordered_json manifest_;
};

// Path of a feature set's matrix inside a run directory, relative to it.
std::string feature_matrix_path(FeatureSetId id);
std::string evaluation_path(FeatureSetId id, learn::ModelKind model);
std::string oof_path(FeatureSetId id, learn::ModelKind model);

// `train`: cross-validate one model on a feature matrix file.
struct TrainRequest {
  std::filesystem::path features;
  std::filesystem::path labels;
  learn::ModelSpec spec;
  std::size_t k = 10;
  std::uint64_t seed = 42;
  std::string feature_set;  // overrides the matrix's own id when non-empty
};
learn::CvResult train(const TrainRequest& req);

// Out-of-fold predictions: user_id,label,score.
void write_oof(const std::filesystem::path& path, const FeatureMatrix& m, const std::vector<int>& y,
               const std::vector<double>& scores);
std::vector<double> read_oof_scores(const std::filesystem::path& path, const std::vector<std::string>& row_ids);

}  // namespace lenslevel
