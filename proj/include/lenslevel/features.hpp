#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenslevel/common.hpp"
#include "lenslevel/dataset.hpp"
#include "lenslevel/textfeat.hpp"

namespace lenslevel {

enum class Family { crowdsourced, user, photo };
enum class Aggregate { min, max, avg, identity };

struct ColumnSpec {
  Family source;
  std::string base_feature;
  Aggregate aggregate;

  // "<base>_<min|max|avg>", or just "<base>" for identity columns.
  std::string name() const;
};

// Base features per family, in column order. Aggregated families expand each
// base feature into consecutive _min, _max, _avg columns.
inline constexpr std::array<std::string_view, 9> kCrowdsourcedFeatures{
    "comments", "views",           "favourites",   "polarity",      "subjectivity",
    "difficult_words", "reading_time", "entropy", "comment_length"};
inline constexpr std::array<std::string_view, 5> kUserFeatures{"photos_number", "join_days", "following",
                                                               "user_groups", "is_pro"};
inline constexpr std::array<std::string_view, 6> kPhotoFeatures{"publication_days", "update_days", "photo_groups",
                                                                "nima_technical",   "nima_aesthetic", "kong"};

enum class FeatureSetId { crowdsourced, user, photo, crowdsourced_user, crowdsourced_photo, user_photo, all };

inline constexpr std::array<FeatureSetId, 7> kAllFeatureSets{
    FeatureSetId::crowdsourced,       FeatureSetId::user,       FeatureSetId::photo, FeatureSetId::crowdsourced_user,
    FeatureSetId::crowdsourced_photo, FeatureSetId::user_photo, FeatureSetId::all};

// "crowdsourced", "user", "photo", "crowdsourced+user", "crowdsourced+photo", "user+photo", "all".
std::string_view to_string(FeatureSetId id);
// Throws ValidationError for an unknown name.
FeatureSetId parse_feature_set(std::string_view name);

std::vector<ColumnSpec> family_columns(Family family);
std::vector<ColumnSpec> feature_set_columns(FeatureSetId id);

// Column subsets used for the aesthetics-vs-social-activity comparison and the correlation matrix.
std::vector<std::string> aesthetic_technical_columns();
std::vector<std::string> social_activity_columns();

struct Triple {
  double min = 0.0;
  double max = 0.0;
  double avg = 0.0;
};

struct UserAggregate {
  std::string user_id;
  std::size_t photo_count = 0;
  std::array<Triple, kPhotoFeatures.size()> photo{};
  std::array<Triple, kCrowdsourcedFeatures.size()> crowdsourced{};
};

struct AggregationOptions {
  // Photos without retained comments contribute 0 to text features; when false they
  // are left out of the text-feature reduction (users with no commented photo get 0).
  bool zero_comment_photos_as_zero = true;
};

// Per-user min/max/avg of photo and crowdsourced features. Text features are first
// averaged per photo over its retained comments. When raw_comments is non-empty the
// per-photo comment count uses it (every written comment); otherwise it counts the
// retained comments in comment_features. Output sorted by user_id.
std::vector<UserAggregate> aggregate_user(const std::vector<PhotoRecord>& photos,
                                          const std::vector<CommentFeatures>& comment_features,
                                          const SnapshotConfig& cfg, const AggregationOptions& options = {},
                                          std::span<const CommentRecord> raw_comments = {});

struct FeatureMatrix {
  std::string feature_set;
  std::vector<std::string> column_names;
  std::vector<std::string> row_ids;  // sorted user ids
  Matrix values;

  std::size_t n_rows() const { return values.rows(); }
  std::size_t n_cols() const { return values.cols(); }
  std::size_t column_index(std::string_view name) const;  // throws ValidationError if absent
};

// Rows are the users present in both inputs; users without photos are skipped with a warning.
FeatureMatrix assemble(FeatureSetId id, const std::vector<UserAggregate>& aggregates,
                       const std::vector<UserRecord>& users, const SnapshotConfig& cfg);

FeatureMatrix select_columns(const FeatureMatrix& m, const std::vector<std::string>& names, std::string label);

struct ColumnScaling {
  double mean = 0.0;
  double sd = 0.0;
};

struct Standardized {
  Matrix values;
  std::vector<ColumnScaling> scaling;
};

// z-scores with mean and population sd fitted on fit_rows only, applied to every
// row. Zero-sd columns map to 0.
std::vector<ColumnScaling> fit_scaling(const Matrix& m, std::span<const std::size_t> fit_rows);
Matrix apply_scaling(const Matrix& m, const std::vector<ColumnScaling>& scaling);
Standardized standardize(const Matrix& m, std::span<const std::size_t> fit_rows);

// features.csv (header user_id + column names) plus manifest.json next to it.
void write_feature_matrix(const std::filesystem::path& csv_path, const FeatureMatrix& m);
FeatureMatrix read_feature_matrix(const std::filesystem::path& csv_path);

}  // namespace lenslevel
