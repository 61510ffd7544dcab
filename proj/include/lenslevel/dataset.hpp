#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lenslevel/common.hpp"

namespace lenslevel {

struct UserRecord {
  std::string user_id;
  std::string occupation;
  std::int64_t total_photos = 0;
  Date join_date{};
  std::int64_t following_count = 0;
  std::int64_t groups_count = 0;
  bool is_pro = false;
  std::int64_t photos_in_window = 0;

  const std::string& key() const { return user_id; }
  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct PhotoRecord {
  std::string photo_id;
  std::string user_id;
  Date upload_date{};
  Date last_update_date{};
  std::int64_t groups_count = 0;
  std::int64_t views = 0;
  std::int64_t favourites = 0;
  double nima_technical = 1.0;
  double nima_aesthetic = 1.0;
  double kong_score = 0.0;

  const std::string& key() const { return photo_id; }
  friend bool operator==(const PhotoRecord&, const PhotoRecord&) = default;
};

struct CommentRecord {
  std::string comment_id;
  std::string photo_id;
  std::string raw_text;

  const std::string& key() const { return comment_id; }
  friend bool operator==(const CommentRecord&, const CommentRecord&) = default;
};

struct Reject {
  std::size_t row_number = 0;  // 1-based data row (CSV header excluded)
  std::string reason;
};

// Rows are sorted by primary key so downstream output never depends on input order.
template <typename Record>
struct Table {
  std::vector<Record> rows;
  std::vector<std::size_t> row_numbers;  // source row of rows[i]
  std::vector<Reject> rejects;
};

using UserTable = Table<UserRecord>;
using PhotoTable = Table<PhotoRecord>;
using CommentTable = Table<CommentRecord>;

struct SnapshotConfig {
  Date reference_date = parse_date("2021-12-31");
  YearMonth window{2021, 12};
  double activity_ratio_cutoff = 0.20;
  double trim_fraction = 0.05;

  // Throws ValidationError if a field is out of its documented range.
  void validate() const;
};

// Format is chosen by extension: ".csv" is CSV with a header row, anything else JSON lines.
// Unreadable file, missing CSV column and duplicate primary key throw ValidationError;
// every other invalid row lands in Table::rejects with its row number.
template <typename Record>
Table<Record> load_table(const std::filesystem::path& path);

template <typename Record>
void write_table(const std::filesystem::path& path, const std::vector<Record>& rows);

void write_rejects(const std::filesystem::path& path, std::string_view table_name,
                   const std::vector<Reject>& rejects);

// Keeps users whose photos_in_window / total_photos is strictly below the cutoff.
std::vector<UserRecord> filter_min_activity(const std::vector<UserRecord>& users, const SnapshotConfig& cfg);

// Drops floor(trim_fraction * n) users from each end of the total_photos ranking
// (ties broken by user_id). Output is sorted by user_id.
std::vector<UserRecord> trim_outliers(const std::vector<UserRecord>& users, const SnapshotConfig& cfg);

std::int64_t days_since(Date date, const SnapshotConfig& cfg);

// Load-time referential checks: rows pointing at an unknown parent move to the rejects log.
void validate_photo_refs(PhotoTable& photos, const std::vector<UserRecord>& users);
void validate_comment_refs(CommentTable& comments, const std::vector<PhotoRecord>& photos);

// Post-filter projection: keeps only children of retained parents.
std::vector<PhotoRecord> photos_of(const std::vector<UserRecord>& users, const std::vector<PhotoRecord>& photos);
std::vector<CommentRecord> comments_of(const std::vector<PhotoRecord>& photos,
                                       const std::vector<CommentRecord>& comments);

}  // namespace lenslevel
