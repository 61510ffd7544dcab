#include "lenslevel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lenslevel/csv.hpp"
#include "lenslevel/digest.hpp"

namespace lenslevel {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Row-level problem; becomes a Reject, never escapes load_table.
struct RowError {
  std::string reason;
};

const json& field(const json& row, const char* name) {
  auto it = row.find(name);
  if (it == row.end()) throw RowError{std::string("missing field '") + name + "'"};
  return *it;
}

std::string get_string(const json& row, const char* name, bool allow_null = false) {
  const json& v = field(row, name);
  if (v.is_string()) return v.get<std::string>();
  if (allow_null && v.is_null()) return {};
  throw RowError{std::string("field '") + name + "' must be a string"};
}

std::int64_t get_count(const json& row, const char* name) {
  const json& v = field(row, name);
  std::int64_t value = 0;
  if (v.is_number_integer()) {
    value = v.get<std::int64_t>();
  } else if (v.is_string()) {
    const auto s = v.get_ref<const std::string&>();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw RowError{std::string("field '") + name + "' is not an integer"};
  } else {
    throw RowError{std::string("field '") + name + "' is not an integer"};
  }
  if (value < 0) throw RowError{"negative count"};
  return value;
}

double get_real(const json& row, const char* name) {
  const json& v = field(row, name);
  double value = 0.0;
  if (v.is_number()) {
    value = v.get<double>();
  } else if (v.is_string()) {
    const auto s = v.get_ref<const std::string&>();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw RowError{std::string("field '") + name + "' is not a number"};
  } else {
    throw RowError{std::string("field '") + name + "' is not a number"};
  }
  if (!std::isfinite(value)) throw RowError{std::string("field '") + name + "' is not finite"};
  return value;
}

double get_score(const json& row, const char* name, double lo, double hi) {
  const double v = get_real(row, name);
  if (v < lo || v > hi) throw RowError{"score out of range"};
  return v;
}

bool get_bool(const json& row, const char* name) {
  const json& v = field(row, name);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() && (v == 0 || v == 1)) return v == 1;
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
  }
  throw RowError{std::string("field '") + name + "' is not a boolean"};
}

Date get_date(const json& row, const char* name) {
  const std::string s = get_string(row, name);
  try {
    return parse_date(s);
  } catch (const ValidationError&) {
    throw RowError{std::string("field '") + name + "' is not a YYYY-MM-DD date"};
  }
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename Record>
struct Schema;

template <>
struct Schema<UserRecord> {
  static constexpr const char* kName = "users";
  static constexpr const char* kKey = "user_id";
  static const std::vector<std::string>& columns() {
    static const std::vector<std::string> c{"user_id",         "occupation",   "total_photos", "join_date",
                                            "following_count", "groups_count", "is_pro",       "photos_in_window"};
    return c;
  }
  static UserRecord parse(const json& row) {
    UserRecord u;
    u.user_id = get_string(row, "user_id");
    u.occupation = get_string(row, "occupation", true);
    u.total_photos = get_count(row, "total_photos");
    u.join_date = get_date(row, "join_date");
    u.following_count = get_count(row, "following_count");
    u.groups_count = get_count(row, "groups_count");
    u.is_pro = get_bool(row, "is_pro");
    u.photos_in_window = get_count(row, "photos_in_window");
    if (u.user_id.empty()) throw RowError{"empty user_id"};
    if (u.photos_in_window > u.total_photos) throw RowError{"photos_in_window exceeds total_photos"};
    return u;
  }
  static ordered_json to_json(const UserRecord& u) {
    return {{"user_id", u.user_id},
            {"occupation", u.occupation},
            {"total_photos", u.total_photos},
            {"join_date", format_date(u.join_date)},
            {"following_count", u.following_count},
            {"groups_count", u.groups_count},
            {"is_pro", u.is_pro},
            {"photos_in_window", u.photos_in_window}};
  }
  static std::vector<std::string> to_csv(const UserRecord& u) {
    return {u.user_id,
            u.occupation,
            std::to_string(u.total_photos),
            format_date(u.join_date),
            std::to_string(u.following_count),
            std::to_string(u.groups_count),
            u.is_pro ? "true" : "false",
            std::to_string(u.photos_in_window)};
  }
};

template <>
struct Schema<PhotoRecord> {
  static constexpr const char* kName = "photos";
  static constexpr const char* kKey = "photo_id";
  static const std::vector<std::string>& columns() {
    static const std::vector<std::string> c{"photo_id",       "user_id",        "upload_date", "last_update_date",
                                            "groups_count",   "views",          "favourites",  "nima_technical",
                                            "nima_aesthetic", "kong_score"};
    return c;
  }
  static PhotoRecord parse(const json& row) {
    PhotoRecord p;
    p.photo_id = get_string(row, "photo_id");
    p.user_id = get_string(row, "user_id");
    p.upload_date = get_date(row, "upload_date");
    p.last_update_date = get_date(row, "last_update_date");
    p.groups_count = get_count(row, "groups_count");
    p.views = get_count(row, "views");
    p.favourites = get_count(row, "favourites");
    p.nima_technical = get_score(row, "nima_technical", 1.0, 10.0);
    p.nima_aesthetic = get_score(row, "nima_aesthetic", 1.0, 10.0);
    p.kong_score = get_score(row, "kong_score", 0.0, 1.0);
    if (p.photo_id.empty()) throw RowError{"empty photo_id"};
    if (p.last_update_date < p.upload_date) throw RowError{"last_update_date before upload_date"};
    return p;
  }
  static ordered_json to_json(const PhotoRecord& p) {
    return {{"photo_id", p.photo_id},
            {"user_id", p.user_id},
            {"upload_date", format_date(p.upload_date)},
            {"last_update_date", format_date(p.last_update_date)},
            {"groups_count", p.groups_count},
            {"views", p.views},
            {"favourites", p.favourites},
            {"nima_technical", p.nima_technical},
            {"nima_aesthetic", p.nima_aesthetic},
            {"kong_score", p.kong_score}};
  }
  static std::vector<std::string> to_csv(const PhotoRecord& p) {
    return {p.photo_id,
            p.user_id,
            format_date(p.upload_date),
            format_date(p.last_update_date),
            std::to_string(p.groups_count),
            std::to_string(p.views),
            std::to_string(p.favourites),
            format_real(p.nima_technical),
            format_real(p.nima_aesthetic),
            format_real(p.kong_score)};
  }
};

template <>
struct Schema<CommentRecord> {
  static constexpr const char* kName = "comments";
  static constexpr const char* kKey = "comment_id";
  static const std::vector<std::string>& columns() {
    static const std::vector<std::string> c{"comment_id", "photo_id", "raw_text"};
    return c;
  }
  static CommentRecord parse(const json& row) {
    CommentRecord c;
    c.comment_id = get_string(row, "comment_id");
    c.photo_id = get_string(row, "photo_id");
    c.raw_text = get_string(row, "raw_text", true);
    if (c.comment_id.empty()) throw RowError{"empty comment_id"};
    return c;
  }
  static ordered_json to_json(const CommentRecord& c) {
    return {{"comment_id", c.comment_id}, {"photo_id", c.photo_id}, {"raw_text", c.raw_text}};
  }
  static std::vector<std::string> to_csv(const CommentRecord& c) { return {c.comment_id, c.photo_id, c.raw_text}; }
};

bool is_csv(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv";
}

// Raw rows as JSON objects (CSV cells become JSON strings), tagged with their row number.
std::vector<std::pair<std::size_t, std::optional<json>>> read_raw_rows(const std::filesystem::path& path,
                                                                       const std::vector<std::string>& columns) {
  std::vector<std::pair<std::size_t, std::optional<json>>> out;
  const std::string text = read_file(path);
  if (is_csv(path)) {
    std::istringstream in(text);
    auto records = csv::read_all(in);
    if (records.empty()) throw ValidationError(path.string() + ": empty CSV file (missing header)");
    const auto& header = records.front().fields;
    std::vector<std::size_t> index(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      auto it = std::find(header.begin(), header.end(), columns[c]);
      if (it == header.end())
        throw ValidationError(path.string() + ": missing required column '" + columns[c] + "'");
      index[c] = static_cast<std::size_t>(it - header.begin());
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.fields.size() != header.size()) {
        out.emplace_back(r, std::nullopt);
        continue;
      }
      json obj = json::object();
      for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = rec.fields[index[c]];
      out.emplace_back(r, std::move(obj));
    }
    return out;
  }

  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++row;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      out.emplace_back(row, std::nullopt);
    } else {
      out.emplace_back(row, std::move(obj));
    }
  }
  return out;
}

template <typename Record>
void sort_table(Table<Record>& table) {
  std::vector<std::size_t> order(table.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return table.rows[a].key() < table.rows[b].key(); });
  std::vector<Record> rows;
  std::vector<std::size_t> numbers;
  rows.reserve(order.size());
  numbers.reserve(order.size());
  for (auto i : order) {
    rows.push_back(std::move(table.rows[i]));
    numbers.push_back(table.row_numbers[i]);
  }
  table.rows = std::move(rows);
  table.row_numbers = std::move(numbers);
}

template <typename Record>
void erase_if_unknown(Table<Record>& table, const std::unordered_set<std::string>& known,
                      std::string (*parent_of)(const Record&), const char* parent_field) {
  Table<Record> kept;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string parent = parent_of(table.rows[i]);
    if (known.count(parent)) {
      kept.rows.push_back(std::move(table.rows[i]));
      kept.row_numbers.push_back(table.row_numbers[i]);
    } else {
      table.rejects.push_back({table.row_numbers[i], std::string("unknown ") + parent_field + " '" + parent + "'"});
    }
  }
  std::sort(table.rejects.begin(), table.rejects.end(),
            [](const Reject& a, const Reject& b) { return a.row_number < b.row_number; });
  table.rows = std::move(kept.rows);
  table.row_numbers = std::move(kept.row_numbers);
}

}  // namespace

void SnapshotConfig::validate() const {
  if (!(trim_fraction > 0.0 && trim_fraction < 0.5))
    throw ValidationError("trim_fraction must be in (0, 0.5), got " + format_real(trim_fraction));
  if (!(activity_ratio_cutoff > 0.0 && activity_ratio_cutoff <= 1.0))
    throw ValidationError("activity_ratio_cutoff must be in (0, 1], got " + format_real(activity_ratio_cutoff));
}

template <typename Record>
Table<Record> load_table(const std::filesystem::path& path) {
  using S = Schema<Record>;
  if (!std::filesystem::exists(path))
    throw ValidationError(std::string(S::kName) + " file '" + path.string() + "' does not exist");

  Table<Record> table;
  std::unordered_map<std::string, std::size_t> seen;
  for (auto& [row_number, raw] : read_raw_rows(path, S::columns())) {
    if (!raw) {
      table.rejects.push_back({row_number, "malformed row"});
      continue;
    }
    try {
      Record rec = S::parse(*raw);
      auto [it, inserted] = seen.emplace(rec.key(), row_number);
      if (!inserted)
        throw ValidationError(path.string() + ": duplicate " + S::kKey + " '" + rec.key() + "' (rows " +
                              std::to_string(it->second) + " and " + std::to_string(row_number) + ")");
      table.rows.push_back(std::move(rec));
      table.row_numbers.push_back(row_number);
    } catch (const RowError& e) {
      table.rejects.push_back({row_number, e.reason});
    }
  }
  sort_table(table);
  return table;
}

template <typename Record>
void write_table(const std::filesystem::path& path, const std::vector<Record>& rows) {
  using S = Schema<Record>;
  std::vector<const Record*> sorted;
  sorted.reserve(rows.size());
  for (const auto& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const Record* a, const Record* b) { return a->key() < b->key(); });

  std::ostringstream out;
  if (is_csv(path)) {
    csv::write_row(out, S::columns());
    for (const auto* r : sorted) csv::write_row(out, S::to_csv(*r));
  } else {
    for (const auto* r : sorted) out << S::to_json(*r).dump() << '\n';
  }
  write_file(path, out.str());
}

template UserTable load_table<UserRecord>(const std::filesystem::path&);
template PhotoTable load_table<PhotoRecord>(const std::filesystem::path&);
template CommentTable load_table<CommentRecord>(const std::filesystem::path&);
template void write_table<UserRecord>(const std::filesystem::path&, const std::vector<UserRecord>&);
template void write_table<PhotoRecord>(const std::filesystem::path&, const std::vector<PhotoRecord>&);
template void write_table<CommentRecord>(const std::filesystem::path&, const std::vector<CommentRecord>&);

void write_rejects(const std::filesystem::path& path, std::string_view table_name, const std::vector<Reject>& rejects) {
  std::ostringstream out;
  for (const auto& r : rejects) {
    ordered_json j{{"table", table_name}, {"row", r.row_number}, {"reason", r.reason}};
    out << j.dump() << '\n';
  }
  write_file(path, out.str());
}

std::vector<UserRecord> filter_min_activity(const std::vector<UserRecord>& users, const SnapshotConfig& cfg) {
  std::vector<UserRecord> kept;
  for (const auto& u : users) {
    if (u.total_photos <= 0) continue;
    const double ratio = static_cast<double>(u.photos_in_window) / static_cast<double>(u.total_photos);
    if (ratio < cfg.activity_ratio_cutoff) kept.push_back(u);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  return kept;
}

std::vector<UserRecord> trim_outliers(const std::vector<UserRecord>& users, const SnapshotConfig& cfg) {
  const std::size_t n = users.size();
  const auto cut = static_cast<std::size_t>(std::floor(cfg.trim_fraction * static_cast<double>(n) + 1e-9));
  std::vector<UserRecord> ranked = users;
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.total_photos != b.total_photos) return a.total_photos < b.total_photos;
    return a.user_id < b.user_id;
  });
  if (2 * cut >= n) return {};
  std::vector<UserRecord> kept(ranked.begin() + static_cast<std::ptrdiff_t>(cut),
                               ranked.end() - static_cast<std::ptrdiff_t>(cut));
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  return kept;
}

std::int64_t days_since(Date date, const SnapshotConfig& cfg) {
  if (date > cfg.reference_date)
    throw ValidationError("date " + format_date(date) + " is after the reference date " +
                          format_date(cfg.reference_date));
  return (cfg.reference_date - date).count();
}

void validate_photo_refs(PhotoTable& photos, const std::vector<UserRecord>& users) {
  std::unordered_set<std::string> known;
  for (const auto& u : users) known.insert(u.user_id);
  erase_if_unknown<PhotoRecord>(
      photos, known, [](const PhotoRecord& p) { return p.user_id; }, "user_id");
}

void validate_comment_refs(CommentTable& comments, const std::vector<PhotoRecord>& photos) {
  std::unordered_set<std::string> known;
  for (const auto& p : photos) known.insert(p.photo_id);
  erase_if_unknown<CommentRecord>(
      comments, known, [](const CommentRecord& c) { return c.photo_id; }, "photo_id");
}

std::vector<PhotoRecord> photos_of(const std::vector<UserRecord>& users, const std::vector<PhotoRecord>& photos) {
  std::unordered_set<std::string> keep;
  for (const auto& u : users) keep.insert(u.user_id);
  std::vector<PhotoRecord> out;
  for (const auto& p : photos)
    if (keep.count(p.user_id)) out.push_back(p);
  return out;
}

std::vector<CommentRecord> comments_of(const std::vector<PhotoRecord>& photos,
                                       const std::vector<CommentRecord>& comments) {
  std::unordered_set<std::string> keep;
  for (const auto& p : photos) keep.insert(p.photo_id);
  std::vector<CommentRecord> out;
  for (const auto& c : comments)
    if (keep.count(c.photo_id)) out.push_back(c);
  return out;
}

}  // namespace lenslevel
