#include "lenslevel/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lenslevel/csv.hpp"
#include "lenslevel/digest.hpp"

namespace lenslevel {

namespace {

constexpr std::array<std::pair<FeatureSetId, std::string_view>, 7> kSetNames{{
    {FeatureSetId::crowdsourced, "crowdsourced"},
    {FeatureSetId::user, "user"},
    {FeatureSetId::photo, "photo"},
    {FeatureSetId::crowdsourced_user, "crowdsourced+user"},
    {FeatureSetId::crowdsourced_photo, "crowdsourced+photo"},
    {FeatureSetId::user_photo, "user+photo"},
    {FeatureSetId::all, "all"},
}};

std::vector<Family> families_of(FeatureSetId id) {
  switch (id) {
    case FeatureSetId::crowdsourced: return {Family::crowdsourced};
    case FeatureSetId::user: return {Family::user};
    case FeatureSetId::photo: return {Family::photo};
    case FeatureSetId::crowdsourced_user: return {Family::crowdsourced, Family::user};
    case FeatureSetId::crowdsourced_photo: return {Family::crowdsourced, Family::photo};
    case FeatureSetId::user_photo: return {Family::user, Family::photo};
    case FeatureSetId::all: return {Family::crowdsourced, Family::user, Family::photo};
  }
  throw Error("unreachable feature set");
}

// Running min/max/sum reduction.
struct Reducer {
  double lo = 0.0, hi = 0.0, sum = 0.0;
  std::size_t n = 0;

  void add(double v) {
    if (n == 0) {
      lo = hi = v;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    sum += v;
    ++n;
  }
  Triple result() const {
    if (n == 0) return {};
    // Clamp so min <= avg <= max survives rounding of the sum.
    const double avg = std::clamp(sum / static_cast<double>(n), lo, hi);
    return {lo, hi, avg};
  }
};

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string ColumnSpec::name() const {
  switch (aggregate) {
    case Aggregate::min: return base_feature + "_min";
    case Aggregate::max: return base_feature + "_max";
    case Aggregate::avg: return base_feature + "_avg";
    case Aggregate::identity: return base_feature;
  }
  return base_feature;
}

std::string_view to_string(FeatureSetId id) {
  for (const auto& [k, name] : kSetNames)
    if (k == id) return name;
  return "?";
}

FeatureSetId parse_feature_set(std::string_view name) {
  for (const auto& [k, n] : kSetNames)
    if (n == name) return k;
  throw ValidationError("unknown feature set '" + std::string(name) +
                        "' (expected crowdsourced, user, photo, crowdsourced+user, crowdsourced+photo, user+photo, all)");
}

std::vector<ColumnSpec> family_columns(Family family) {
  std::vector<ColumnSpec> cols;
  auto expand = [&](auto const& bases) {
    for (auto base : bases)
      for (auto agg : {Aggregate::min, Aggregate::max, Aggregate::avg}) cols.push_back({family, std::string(base), agg});
  };
  switch (family) {
    case Family::crowdsourced: expand(kCrowdsourcedFeatures); break;
    case Family::photo: expand(kPhotoFeatures); break;
    case Family::user:
      for (auto base : kUserFeatures) cols.push_back({family, std::string(base), Aggregate::identity});
      break;
  }
  return cols;
}

std::vector<ColumnSpec> feature_set_columns(FeatureSetId id) {
  std::vector<ColumnSpec> cols;
  for (Family f : families_of(id)) {
    auto part = family_columns(f);
    cols.insert(cols.end(), part.begin(), part.end());
  }
  return cols;
}

std::vector<std::string> aesthetic_technical_columns() {
  std::vector<std::string> out;
  for (auto base : {"nima_technical", "nima_aesthetic", "kong"})
    for (auto agg : {"_min", "_max", "_avg"}) out.push_back(std::string(base) + agg);
  return out;
}

std::vector<std::string> social_activity_columns() {
  std::vector<std::string> out;
  for (auto base : {"comments", "favourites"})
    for (auto agg : {"_min", "_max", "_avg"}) out.push_back(std::string(base) + agg);
  return out;
}

std::vector<UserAggregate> aggregate_user(const std::vector<PhotoRecord>& photos,
                                          const std::vector<CommentFeatures>& comment_features,
                                          const SnapshotConfig& cfg, const AggregationOptions& options,
                                          std::span<const CommentRecord> raw_comments) {
  constexpr std::size_t kTextFeatures = 6;  // polarity .. comment_length
  struct PhotoText {
    std::array<double, kTextFeatures> sum{};
    std::size_t n = 0;
  };

  // Sorted containers keep the floating-point summation order independent of input order.
  std::vector<const CommentFeatures*> comments;
  comments.reserve(comment_features.size());
  for (const auto& f : comment_features) comments.push_back(&f);
  std::sort(comments.begin(), comments.end(), [](const CommentFeatures* a, const CommentFeatures* b) {
    return a->photo_id != b->photo_id ? a->photo_id < b->photo_id : a->comment_id < b->comment_id;
  });
  std::map<std::string, PhotoText> text;
  for (const auto* fp : comments) {
    const auto& f = *fp;
    auto& t = text[f.photo_id];
    const std::array<double, kTextFeatures> v{f.polarity,       f.subjectivity, static_cast<double>(f.difficult_words),
                                              f.reading_time_s, f.entropy_bits, static_cast<double>(f.length_chars)};
    for (std::size_t i = 0; i < kTextFeatures; ++i) t.sum[i] += v[i];
    ++t.n;
  }
  std::unordered_map<std::string, std::size_t> raw_counts;
  for (const auto& c : raw_comments) ++raw_counts[c.photo_id];

  std::vector<const PhotoRecord*> ordered;
  ordered.reserve(photos.size());
  for (const auto& p : photos) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const PhotoRecord* a, const PhotoRecord* b) {
    return a->user_id != b->user_id ? a->user_id < b->user_id : a->photo_id < b->photo_id;
  });

  std::vector<UserAggregate> out;
  std::size_t i = 0;
  while (i < ordered.size()) {
    const std::string& uid = ordered[i]->user_id;
    std::array<Reducer, kPhotoFeatures.size()> photo_red{};
    std::array<Reducer, kCrowdsourcedFeatures.size()> crowd_red{};
    std::size_t count = 0;
    for (; i < ordered.size() && ordered[i]->user_id == uid; ++i) {
      const PhotoRecord& p = *ordered[i];
      ++count;
      photo_red[0].add(static_cast<double>(days_since(p.upload_date, cfg)));
      photo_red[1].add(static_cast<double>(days_since(p.last_update_date, cfg)));
      photo_red[2].add(static_cast<double>(p.groups_count));
      photo_red[3].add(p.nima_technical);
      photo_red[4].add(p.nima_aesthetic);
      photo_red[5].add(p.kong_score);

      auto it = text.find(p.photo_id);
      const std::size_t retained = it == text.end() ? 0 : it->second.n;
      std::size_t comment_count = retained;
      if (!raw_comments.empty()) {
        auto rc = raw_counts.find(p.photo_id);
        comment_count = rc == raw_counts.end() ? 0 : rc->second;
      }
      crowd_red[0].add(static_cast<double>(comment_count));
      crowd_red[1].add(static_cast<double>(p.views));
      crowd_red[2].add(static_cast<double>(p.favourites));
      if (retained > 0) {
        for (std::size_t k = 0; k < kTextFeatures; ++k)
          crowd_red[3 + k].add(it->second.sum[k] / static_cast<double>(retained));
      } else if (options.zero_comment_photos_as_zero) {
        for (std::size_t k = 0; k < kTextFeatures; ++k) crowd_red[3 + k].add(0.0);
      }
    }
    UserAggregate agg;
    agg.user_id = uid;
    agg.photo_count = count;
    for (std::size_t k = 0; k < photo_red.size(); ++k) agg.photo[k] = photo_red[k].result();
    for (std::size_t k = 0; k < crowd_red.size(); ++k) agg.crowdsourced[k] = crowd_red[k].result();
    out.push_back(std::move(agg));
  }
  return out;
}

std::size_t FeatureMatrix::column_index(std::string_view name) const {
  auto it = std::find(column_names.begin(), column_names.end(), name);
  if (it == column_names.end()) throw ValidationError("feature matrix has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - column_names.begin());
}

FeatureMatrix assemble(FeatureSetId id, const std::vector<UserAggregate>& aggregates,
                       const std::vector<UserRecord>& users, const SnapshotConfig& cfg) {
  std::unordered_map<std::string_view, const UserAggregate*> by_user;
  for (const auto& a : aggregates) by_user.emplace(a.user_id, &a);

  std::vector<const UserRecord*> rows;
  std::size_t skipped = 0;
  for (const auto& u : users) {
    if (by_user.count(u.user_id)) {
      rows.push_back(&u);
    } else {
      ++skipped;
    }
  }
  if (skipped > 0)
    log_warn("featurize: " + std::to_string(skipped) + " user(s) without photos excluded from the feature matrix");
  std::sort(rows.begin(), rows.end(), [](const UserRecord* a, const UserRecord* b) { return a->user_id < b->user_id; });

  const auto specs = feature_set_columns(id);
  FeatureMatrix fm;
  fm.feature_set = std::string(to_string(id));
  for (const auto& s : specs) fm.column_names.push_back(s.name());
  fm.values = Matrix(rows.size(), specs.size());

  auto base_index = [](auto const& bases, const std::string& name) {
    return static_cast<std::size_t>(std::find(bases.begin(), bases.end(), name) - bases.begin());
  };
  auto pick = [](const Triple& t, Aggregate a) {
    return a == Aggregate::min ? t.min : a == Aggregate::max ? t.max : t.avg;
  };

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const UserRecord& u = *rows[r];
    const UserAggregate& agg = *by_user.at(u.user_id);
    fm.row_ids.push_back(u.user_id);
    for (std::size_t c = 0; c < specs.size(); ++c) {
      const auto& s = specs[c];
      double v = 0.0;
      switch (s.source) {
        case Family::photo: v = pick(agg.photo[base_index(kPhotoFeatures, s.base_feature)], s.aggregate); break;
        case Family::crowdsourced:
          v = pick(agg.crowdsourced[base_index(kCrowdsourcedFeatures, s.base_feature)], s.aggregate);
          break;
        case Family::user:
          switch (base_index(kUserFeatures, s.base_feature)) {
            case 0: v = static_cast<double>(u.total_photos); break;
            case 1: v = static_cast<double>(days_since(u.join_date, cfg)); break;
            case 2: v = static_cast<double>(u.following_count); break;
            case 3: v = static_cast<double>(u.groups_count); break;
            case 4: v = u.is_pro ? 1.0 : 0.0; break;
          }
          break;
      }
      fm.values(r, c) = v;
    }
  }
  return fm;
}

FeatureMatrix select_columns(const FeatureMatrix& m, const std::vector<std::string>& names, std::string label) {
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(m.column_index(n));
  FeatureMatrix out;
  out.feature_set = std::move(label);
  out.column_names = names;
  out.row_ids = m.row_ids;
  out.values = m.values.select_cols(idx);
  return out;
}

std::vector<ColumnScaling> fit_scaling(const Matrix& m, std::span<const std::size_t> fit_rows) {
  if (fit_rows.empty()) throw Error("standardize: fit_rows is empty");
  std::vector<ColumnScaling> scaling(m.cols());
  const double n = static_cast<double>(fit_rows.size());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double mean = 0.0;
    for (auto r : fit_rows) mean += m(r, c);
    mean /= n;
    double ss = 0.0;
    for (auto r : fit_rows) ss += (m(r, c) - mean) * (m(r, c) - mean);
    scaling[c] = {mean, std::sqrt(ss / n)};
  }
  return scaling;
}

Matrix apply_scaling(const Matrix& m, const std::vector<ColumnScaling>& scaling) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      out(r, c) = scaling[c].sd > 0.0 ? (m(r, c) - scaling[c].mean) / scaling[c].sd : 0.0;
  return out;
}

Standardized standardize(const Matrix& m, std::span<const std::size_t> fit_rows) {
  auto scaling = fit_scaling(m, fit_rows);
  return {apply_scaling(m, scaling), std::move(scaling)};
}

void write_feature_matrix(const std::filesystem::path& csv_path, const FeatureMatrix& m) {
  std::ostringstream out;
  std::vector<std::string> header{"user_id"};
  header.insert(header.end(), m.column_names.begin(), m.column_names.end());
  csv::write_row(out, header);
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    std::vector<std::string> fields{m.row_ids[r]};
    for (double v : m.values.row(r)) fields.push_back(format_real(v));
    csv::write_row(out, fields);
  }
  write_file(csv_path, out.str());

  nlohmann::ordered_json manifest{{"feature_set_id", m.feature_set},
                                  {"column_names", m.column_names},
                                  {"n_rows", m.n_rows()},
                                  {"n_cols", m.n_cols()}};
  write_file(csv_path.parent_path() / "manifest.json", manifest.dump(2) + "\n");
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& csv_path) {
  std::istringstream in(read_file(csv_path));
  auto records = csv::read_all(in);
  if (records.empty() || records.front().fields.empty() || records.front().fields.front() != "user_id")
    throw ValidationError(csv_path.string() + ": expected a header starting with user_id");
  FeatureMatrix fm;
  fm.column_names.assign(records.front().fields.begin() + 1, records.front().fields.end());
  {
    std::unordered_set<std::string> unique(fm.column_names.begin(), fm.column_names.end());
    if (unique.size() != fm.column_names.size()) throw ValidationError(csv_path.string() + ": duplicate column names");
  }
  fm.values = Matrix(records.size() - 1, fm.column_names.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() != fm.column_names.size() + 1)
      throw ValidationError(csv_path.string() + ":" + std::to_string(records[r].line) + ": wrong field count");
    fm.row_ids.push_back(f[0]);
    for (std::size_t c = 1; c < f.size(); ++c) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f[c].data(), f[c].data() + f[c].size(), v);
      if (ec != std::errc{} || ptr != f[c].data() + f[c].size() || !std::isfinite(v))
        throw ValidationError(csv_path.string() + ":" + std::to_string(records[r].line) + ": non-numeric value '" +
                              f[c] + "'");
      fm.values(r - 1, c - 1) = v;
    }
  }
  if (!std::is_sorted(fm.row_ids.begin(), fm.row_ids.end()))
    throw ValidationError(csv_path.string() + ": rows must be sorted by user_id");

  const auto manifest_path = csv_path.parent_path() / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    const auto j = nlohmann::json::parse(read_file(manifest_path));
    fm.feature_set = j.value("feature_set_id", "");
  }
  return fm;
}

}  // namespace lenslevel
