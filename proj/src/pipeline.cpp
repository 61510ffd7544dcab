#include "lenslevel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lenslevel/csv.hpp"
#include "lenslevel/digest.hpp"
#include "lenslevel/labeler.hpp"
#include "lenslevel/learn/metrics.hpp"
#include "lenslevel/stats.hpp"
#include "lenslevel/textfeat.hpp"
#include "lenslevel/textprep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace lenslevel {

namespace {

constexpr const char* kAestheticTechnical = "aesthetic_technical";
constexpr const char* kSocialActivity = "social_activity";

void check_keys(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: '" + where + key + "' has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string step_dir(std::string_view step) { return std::string(step); }

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename Record>
void reject_if(Table<Record>& table, const std::string& reason, auto pred) {
  Table<Record> kept;
  kept.rejects = std::move(table.rejects);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (pred(table.rows[i])) {
      kept.rejects.push_back({table.row_numbers[i], reason});
    } else {
      kept.rows.push_back(std::move(table.rows[i]));
      kept.row_numbers.push_back(table.row_numbers[i]);
    }
  }
  std::sort(kept.rejects.begin(), kept.rejects.end(),
            [](const Reject& a, const Reject& b) { return a.row_number < b.row_number; });
  table = std::move(kept);
}

template <typename Record>
void sort_by_key(std::vector<Record>& rows) {
  std::sort(rows.begin(), rows.end(), [](const Record& a, const Record& b) { return a.key() < b.key(); });
}

void require_file(const fs::path& path, const std::string& what, const std::string& hint) {
  if (!fs::is_regular_file(path))
    throw ValidationError(what + " file '" + path.string() + "' does not exist; " + hint);
}

}  // namespace

// ---------------------------------------------------------------- config

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  const fs::path data_dir(LENSLEVEL_DATA_DIR);
  cfg.data = {data_dir / "sentiment_lexicon.tsv", data_dir / "stopwords.txt", data_dir / "emoji_names.tsv",
              data_dir / "easy_words.txt"};
  return cfg;
}

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  PipelineConfig cfg = defaults();
  check_keys(j,
             {"users", "photos", "comments", "out", "snapshot", "seed", "k", "models", "feature_sets",
              "hyperparameters", "group_model", "characterize", "data", "reading_seconds_per_char",
              "zero_comment_photos"},
             "");
  if (j.contains("users")) cfg.users = resolve(base_dir, get<std::string>(j, "users", ""));
  if (j.contains("photos")) cfg.photos = resolve(base_dir, get<std::string>(j, "photos", ""));
  if (j.contains("comments")) cfg.comments = resolve(base_dir, get<std::string>(j, "comments", ""));
  if (j.contains("out")) cfg.out = resolve(base_dir, get<std::string>(j, "out", ""));
  if (j.contains("snapshot")) {
    const json& s = j["snapshot"];
    check_keys(s,
               {"reference_date", "window", "activity_ratio_cutoff", "trim_fraction", "apply_activity_filter",
                "apply_trim"},
               "snapshot");
    if (s.contains("reference_date"))
      cfg.snapshot.reference_date = parse_date(get<std::string>(s, "reference_date", "snapshot."));
    if (s.contains("window")) cfg.snapshot.window = parse_year_month(get<std::string>(s, "window", "snapshot."));
    if (s.contains("activity_ratio_cutoff"))
      cfg.snapshot.activity_ratio_cutoff = get<double>(s, "activity_ratio_cutoff", "snapshot.");
    if (s.contains("trim_fraction")) cfg.snapshot.trim_fraction = get<double>(s, "trim_fraction", "snapshot.");
    if (s.contains("apply_activity_filter"))
      cfg.apply_activity_filter = get<bool>(s, "apply_activity_filter", "snapshot.");
    if (s.contains("apply_trim")) cfg.apply_trim = get<bool>(s, "apply_trim", "snapshot.");
  }
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed", "");
  if (j.contains("k")) cfg.k = get<std::size_t>(j, "k", "");
  if (j.contains("models")) {
    cfg.models.clear();
    for (const auto& name : get<std::vector<std::string>>(j, "models", ""))
      cfg.models.push_back(learn::parse_model_kind(name));
  }
  if (j.contains("feature_sets")) {
    cfg.feature_sets.clear();
    for (const auto& name : get<std::vector<std::string>>(j, "feature_sets", ""))
      cfg.feature_sets.push_back(parse_feature_set(name));
  }
  if (j.contains("hyperparameters")) cfg.hyperparameters = j["hyperparameters"];
  if (j.contains("group_model")) cfg.group_model = learn::parse_model_kind(get<std::string>(j, "group_model", ""));
  if (j.contains("characterize")) {
    const json& c = j["characterize"];
    check_keys(c, {"labels", "model", "feature_set", "matrix"}, "characterize");
    if (c.contains("labels")) cfg.characterize.labels = get<std::string>(c, "labels", "characterize.");
    if (c.contains("model"))
      cfg.characterize.model = learn::parse_model_kind(get<std::string>(c, "model", "characterize."));
    if (c.contains("feature_set"))
      cfg.characterize.feature_set = parse_feature_set(get<std::string>(c, "feature_set", "characterize."));
    if (c.contains("matrix")) cfg.characterize.matrix = parse_feature_set(get<std::string>(c, "matrix", "characterize."));
  }
  if (j.contains("data")) {
    const json& d = j["data"];
    check_keys(d, {"lexicon", "stopwords", "emoji", "easy_words"}, "data");
    if (d.contains("lexicon")) cfg.data.lexicon = resolve(base_dir, get<std::string>(d, "lexicon", "data."));
    if (d.contains("stopwords")) cfg.data.stopwords = resolve(base_dir, get<std::string>(d, "stopwords", "data."));
    if (d.contains("emoji")) cfg.data.emoji = resolve(base_dir, get<std::string>(d, "emoji", "data."));
    if (d.contains("easy_words")) cfg.data.easy_words = resolve(base_dir, get<std::string>(d, "easy_words", "data."));
  }
  if (j.contains("reading_seconds_per_char"))
    cfg.reading_seconds_per_char = get<double>(j, "reading_seconds_per_char", "");
  if (j.contains("zero_comment_photos")) {
    const auto mode = get<std::string>(j, "zero_comment_photos", "");
    if (mode != "zero" && mode != "skip")
      throw ValidationError("config: zero_comment_photos must be \"zero\" or \"skip\", got '" + mode + "'");
    cfg.zero_comment_photos_as_zero = mode == "zero";
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return from_json(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

learn::ModelSpec PipelineConfig::model_spec(learn::ModelKind kind) const {
  learn::ModelSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  learn::apply_hyperparameters(spec, hyperparameters);
  return spec;
}

void PipelineConfig::validate() const {
  snapshot.validate();
  if (k < 2) throw ValidationError("config: k must be at least 2");
  if (models.empty()) throw ValidationError("config: models is empty");
  if (feature_sets.empty()) throw ValidationError("config: feature_sets is empty");
  if (std::set<learn::ModelKind>(models.begin(), models.end()).size() != models.size())
    throw ValidationError("config: models lists a model twice");
  if (std::set<FeatureSetId>(feature_sets.begin(), feature_sets.end()).size() != feature_sets.size())
    throw ValidationError("config: feature_sets lists a set twice");
  model_spec(learn::ModelKind::random_forest);  // validates the hyperparameter block
  if (!(reading_seconds_per_char > 0) || !std::isfinite(reading_seconds_per_char))
    throw ValidationError("config: reading_seconds_per_char must be positive");
  const auto& c = characterize;
  if (c.labels != "predicted" && c.labels != "ground_truth")
    throw ValidationError("config: characterize.labels must be \"predicted\" or \"ground_truth\"");
  if (c.labels == "predicted") {
    if (std::find(models.begin(), models.end(), c.model) == models.end())
      throw ValidationError("config: characterize.model '" + std::string(learn::to_string(c.model)) +
                            "' is not in models");
    if (std::find(feature_sets.begin(), feature_sets.end(), c.feature_set) == feature_sets.end())
      throw ValidationError("config: characterize.feature_set '" + std::string(to_string(c.feature_set)) +
                            "' is not in feature_sets");
  }
}

ordered_json PipelineConfig::settings_json() const {
  ordered_json j;
  j["snapshot"] = {{"reference_date", format_date(snapshot.reference_date)},
                   {"window", format_year_month(snapshot.window)},
                   {"activity_ratio_cutoff", snapshot.activity_ratio_cutoff},
                   {"trim_fraction", snapshot.trim_fraction},
                   {"apply_activity_filter", apply_activity_filter},
                   {"apply_trim", apply_trim}};
  j["seed"] = seed;
  j["k"] = k;
  auto& m = j["models"] = ordered_json::array();
  for (auto kind : models) m.push_back(learn::to_string(kind));
  auto& s = j["feature_sets"] = ordered_json::array();
  for (auto id : feature_sets) s.push_back(to_string(id));
  auto& h = j["hyperparameters"] = ordered_json::object();
  for (auto kind : learn::kAllModels) h[std::string(learn::to_string(kind))] = learn::hyperparameters_json(model_spec(kind));
  j["group_model"] = learn::to_string(group_model);
  j["characterize"] = {{"labels", characterize.labels},
                       {"model", learn::to_string(characterize.model)},
                       {"feature_set", to_string(characterize.feature_set)},
                       {"matrix", to_string(characterize.matrix)}};
  j["reading_seconds_per_char"] = reading_seconds_per_char;
  j["zero_comment_photos"] = zero_comment_photos_as_zero ? "zero" : "skip";
  return j;
}

// ---------------------------------------------------------------- paths

std::string feature_matrix_path(FeatureSetId id) { return "featurize/" + std::string(to_string(id)) + "/features.csv"; }

std::string evaluation_path(FeatureSetId id, learn::ModelKind model) {
  return "evaluate/" + std::string(to_string(id)) + "/" + std::string(learn::to_string(model)) + ".json";
}

std::string oof_path(FeatureSetId id, learn::ModelKind model) {
  return "evaluate/" + std::string(to_string(id)) + "/" + std::string(learn::to_string(model)) + "_oof.csv";
}

namespace {

std::string group_path(const char* group) { return std::string("evaluate/groups/") + group + ".json"; }

std::string feature_manifest_path(FeatureSetId id) {
  return "featurize/" + std::string(to_string(id)) + "/manifest.json";
}

}  // namespace

// ---------------------------------------------------------------- out-of-fold predictions

void write_oof(const fs::path& path, const FeatureMatrix& m, const std::vector<int>& y,
               const std::vector<double>& scores) {
  std::ostringstream out;
  csv::write_row(out, {"user_id", "label", "score"});
  for (std::size_t i = 0; i < m.n_rows(); ++i)
    csv::write_row(out, {m.row_ids[i], std::to_string(y[i]), stats::format_number(scores[i])});
  write_file(path, out.str());
}

std::vector<double> read_oof_scores(const fs::path& path, const std::vector<std::string>& row_ids) {
  std::istringstream in(read_file(path));
  const auto records = csv::read_all(in);
  if (records.empty() || records[0].fields != std::vector<std::string>{"user_id", "label", "score"})
    throw ValidationError(path.string() + ": expected header user_id,label,score");
  std::map<std::string, double> score;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != 3) throw ValidationError(path.string() + ": malformed row " + std::to_string(records[i].line));
    try {
      std::size_t used = 0;
      const double v = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("trailing");
      score[f[0]] = v;
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ": bad score on line " + std::to_string(records[i].line));
    }
  }
  std::vector<double> out;
  out.reserve(row_ids.size());
  for (const auto& id : row_ids) {
    auto it = score.find(id);
    if (it == score.end()) throw ValidationError(path.string() + ": no prediction for user '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

learn::CvResult train(const TrainRequest& req) {
  const FeatureMatrix m = read_feature_matrix(req.features);
  const LabelVector labels = read_labels(req.labels);
  const std::vector<int> y = labels.lookup(m.row_ids);
  return learn::cross_validate(req.spec, m.values, y, req.k, req.seed,
                               req.feature_set.empty() ? m.feature_set : req.feature_set);
}

// ---------------------------------------------------------------- pipeline

Pipeline::Pipeline(PipelineConfig cfg, fs::path out_dir) : cfg_(std::move(cfg)), out_(std::move(out_dir)) {
  cfg_.validate();
  if (out_.empty()) throw ValidationError("no output directory given (set \"out\" in the config or pass --out)");
  fs::create_directories(out_);
  const fs::path manifest_file = out_ / "manifest.json";
  if (fs::exists(manifest_file)) {
    try {
      manifest_ = ordered_json::parse(read_file(manifest_file));
    } catch (const json::exception&) {
      log_warn("ignoring unreadable manifest " + manifest_file.string());
      manifest_ = ordered_json::object();
    }
  }
  if (!manifest_.is_object()) manifest_ = ordered_json::object();
  if (!manifest_.contains("steps") || !manifest_["steps"].is_object()) manifest_["steps"] = ordered_json::object();
}

std::string Pipeline::upstream_digest(std::string_view step, const std::string& rel) const {
  const auto& steps = manifest_["steps"];
  const std::string name(step);
  const fs::path file = out_ / rel;
  if (!steps.contains(name) || !steps[name]["outputs"].contains(rel) || !fs::exists(file))
    throw ValidationError("'" + rel + "' is missing from " + out_.string() + "; run `lenslevel " + name + "` first");
  const std::string digest = sha256_file(file);
  if (digest != steps[name]["outputs"][rel].get<std::string>())
    throw ValidationError("'" + rel + "' was modified after step '" + name + "' wrote it; rerun `lenslevel " + name +
                          "`");
  return digest;
}

ordered_json Pipeline::step_settings(std::string_view step) const {
  const ordered_json all = cfg_.settings_json();
  ordered_json s = ordered_json::object();
  if (step == "ingest") {
    s["snapshot"] = all["snapshot"];
  } else if (step == "textfeat") {
    s["reading_seconds_per_char"] = all["reading_seconds_per_char"];
  } else if (step == "label") {
    s["source"] = label_source_ ? "file" : "ingest";
  } else if (step == "featurize") {
    s["reference_date"] = all["snapshot"]["reference_date"];
    s["zero_comment_photos"] = all["zero_comment_photos"];
  } else if (step == "evaluate") {
    for (const char* key : {"seed", "k", "models", "feature_sets", "hyperparameters", "group_model"}) s[key] = all[key];
  } else if (step == "characterize") {
    s["characterize"] = all["characterize"];
  } else if (step == "reports") {
    s["models"] = all["models"];
    s["feature_sets"] = all["feature_sets"];
    s["group_model"] = all["group_model"];
  }
  return s;
}

std::vector<std::pair<std::string, std::string>> Pipeline::step_inputs(std::string_view step) const {
  std::vector<std::pair<std::string, std::string>> in;
  auto external = [&](const char* role, const fs::path& path, const std::string& hint) {
    require_file(path, role, hint);
    in.emplace_back(role, sha256_file(path));
  };
  auto upstream = [&](std::string_view from, const std::string& rel) {
    in.emplace_back(rel, upstream_digest(from, rel));
  };
  if (step == "ingest") {
    external("users", cfg_.users, "set \"users\" in the config or pass --users");
    external("photos", cfg_.photos, "set \"photos\" in the config or pass --photos");
    external("comments", cfg_.comments, "set \"comments\" in the config or pass --comments");
  } else if (step == "textprep") {
    external("stopwords", cfg_.data.stopwords, "check data.stopwords in the config");
    external("emoji", cfg_.data.emoji, "check data.emoji in the config");
    upstream("ingest", "ingest/comments.jsonl");
  } else if (step == "textfeat") {
    external("lexicon", cfg_.data.lexicon, "check data.lexicon in the config");
    external("easy_words", cfg_.data.easy_words, "check data.easy_words in the config");
    upstream("textprep", "textprep/clean_comments.jsonl");
  } else if (step == "label") {
    if (label_source_)
      external("label_users", *label_source_, "check --users");
    else
      upstream("ingest", "ingest/users.jsonl");
  } else if (step == "featurize") {
    upstream("ingest", "ingest/users.jsonl");
    upstream("ingest", "ingest/photos.jsonl");
    upstream("ingest", "ingest/comments.jsonl");
    upstream("textfeat", "textfeat/comment_features.jsonl");
  } else if (step == "evaluate") {
    std::set<FeatureSetId> sets(cfg_.feature_sets.begin(), cfg_.feature_sets.end());
    sets.insert(FeatureSetId::all);
    for (auto id : kAllFeatureSets)
      if (sets.count(id)) upstream("featurize", feature_matrix_path(id));
    upstream("label", "label/labels.jsonl");
  } else if (step == "correlate") {
    upstream("featurize", feature_matrix_path(FeatureSetId::all));
  } else if (step == "characterize") {
    upstream("featurize", feature_matrix_path(cfg_.characterize.matrix));
    if (cfg_.characterize.labels == "predicted")
      upstream("evaluate", oof_path(cfg_.characterize.feature_set, cfg_.characterize.model));
    else
      upstream("label", "label/labels.jsonl");
  } else if (step == "reports") {
    for (auto id : cfg_.feature_sets)
      for (auto kind : cfg_.models) upstream("evaluate", evaluation_path(id, kind));
    upstream("evaluate", group_path(kAestheticTechnical));
    upstream("evaluate", group_path(kSocialActivity));
  } else {
    throw ValidationError("unknown step '" + std::string(step) + "'");
  }
  return in;
}

bool Pipeline::step_current(std::string_view step, const std::string& key) const {
  const auto& steps = manifest_["steps"];
  const std::string name(step);
  if (!steps.contains(name) || steps[name].value("key", "") != key) return false;
  for (const auto& [rel, digest] : steps[name]["outputs"].items()) {
    const fs::path file = out_ / rel;
    if (!fs::exists(file) || sha256_file(file) != digest.get<std::string>()) return false;
  }
  return true;
}

StepOutcome Pipeline::run_step(std::string_view step) {
  if (std::find(kSteps.begin(), kSteps.end(), step) == kSteps.end())
    throw ValidationError("unknown step '" + std::string(step) + "'");
  const std::string name(step);
  const auto started = std::chrono::steady_clock::now();
  StepOutcome outcome{name, false};
  try {
    const auto inputs = step_inputs(step);
    ordered_json key_doc;
    key_doc["step"] = name;
    key_doc["tool_version"] = kToolVersion;
    key_doc["settings"] = step_settings(step);
    auto& in = key_doc["inputs"] = ordered_json::object();
    for (const auto& [role, digest] : inputs) in[role] = digest;
    const std::string key = sha256_hex(key_doc.dump());

    if (step_current(step, key)) {
      outcome.cached = true;
      log_info(name + ": outputs are current, skipped");
    } else {
      log_info(name + ": running");
      fs::remove_all(out_ / step_dir(step));
      manifest_["steps"].erase(name);
      std::vector<std::string> outputs = execute(step);
      std::sort(outputs.begin(), outputs.end());
      ordered_json entry;
      entry["key"] = key;
      entry["inputs"] = key_doc["inputs"];
      auto& out = entry["outputs"] = ordered_json::object();
      for (const auto& rel : outputs) out[rel] = sha256_file(out_ / rel);
      manifest_["steps"][name] = std::move(entry);
    }
  } catch (const ValidationError& e) {
    throw ValidationError("step '" + name + "' failed: " + e.what());
  } catch (const std::exception& e) {
    throw Error("step '" + name + "' failed: " + e.what());
  }
  write_manifest();
  append_run_log(outcome, std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
  return outcome;
}

std::vector<StepOutcome> Pipeline::run_all() {
  std::vector<StepOutcome> outcomes;
  for (auto step : kSteps) outcomes.push_back(run_step(step));
  return outcomes;
}

void Pipeline::write_manifest() {
  ordered_json m;
  m["tool_version"] = kToolVersion;
  m["config_hash"] = sha256_hex(cfg_.settings_json().dump());
  ordered_json inputs = ordered_json::object();
  ordered_json data_files = ordered_json::object();
  ordered_json steps = ordered_json::object();
  for (auto step : kSteps) {
    const std::string name(step);
    if (!manifest_["steps"].contains(name)) continue;
    const auto& entry = manifest_["steps"][name];
    for (const auto& [role, digest] : entry["inputs"].items()) {
      if (role == "users" || role == "photos" || role == "comments" || role == "label_users") inputs[role] = digest;
      if (role == "stopwords" || role == "emoji" || role == "lexicon" || role == "easy_words") data_files[role] = digest;
    }
    steps[name] = entry;
  }
  m["inputs"] = std::move(inputs);
  m["data_files"] = std::move(data_files);
  m["steps"] = std::move(steps);
  m["run_log"] = "run_log.json";
  manifest_ = std::move(m);
  write_file(out_ / "manifest.json", manifest_.dump(2) + "\n");
}

void Pipeline::append_run_log(const StepOutcome& outcome, double seconds) {
  const fs::path path = out_ / "run_log.json";
  ordered_json log = ordered_json::array();
  if (fs::exists(path)) {
    try {
      log = ordered_json::parse(read_file(path));
    } catch (const json::exception&) {
      log = ordered_json::array();
    }
    if (!log.is_array()) log = ordered_json::array();
  }
  log.push_back({{"step", outcome.step},
                 {"status", outcome.cached ? "cached" : "ran"},
                 {"finished_at", utc_now()},
                 {"seconds", std::round(seconds * 1000.0) / 1000.0}});
  write_file(path, log.dump(2) + "\n");
}

std::vector<std::string> Pipeline::execute(std::string_view step) {
  if (step == "ingest") return do_ingest();
  if (step == "textprep") return do_textprep();
  if (step == "textfeat") return do_textfeat();
  if (step == "label") return do_label();
  if (step == "featurize") return do_featurize();
  if (step == "evaluate") return do_evaluate();
  if (step == "correlate") return do_correlate();
  if (step == "characterize") return do_characterize();
  return do_reports();
}

// ---------------------------------------------------------------- steps

std::vector<std::string> Pipeline::do_ingest() {
  const auto& snap = cfg_.snapshot;
  UserTable users = load_table<UserRecord>(cfg_.users);
  PhotoTable photos = load_table<PhotoRecord>(cfg_.photos);
  CommentTable comments = load_table<CommentRecord>(cfg_.comments);

  reject_if(users, "join_date after reference_date",
            [&](const UserRecord& u) { return u.join_date > snap.reference_date; });
  reject_if(photos, "date after reference_date", [&](const PhotoRecord& p) {
    return p.upload_date > snap.reference_date || p.last_update_date > snap.reference_date;
  });
  validate_photo_refs(photos, users.rows);
  validate_comment_refs(comments, photos.rows);

  std::vector<UserRecord> kept = users.rows;
  if (cfg_.apply_activity_filter) kept = filter_min_activity(kept, snap);
  const std::size_t after_filter = kept.size();
  if (cfg_.apply_trim) kept = trim_outliers(kept, snap);
  sort_by_key(kept);
  std::vector<PhotoRecord> kept_photos = photos_of(kept, photos.rows);
  sort_by_key(kept_photos);
  std::vector<CommentRecord> kept_comments = comments_of(kept_photos, comments.rows);
  sort_by_key(kept_comments);

  for (const auto& [name, n] : {std::pair{"users", users.rejects.size()}, std::pair{"photos", photos.rejects.size()},
                                std::pair{"comments", comments.rejects.size()}})
    if (n > 0) log_warn("ingest: rejected " + std::to_string(n) + " " + name + " rows (see ingest/rejects_" + name + ".jsonl)");

  write_table(out_ / "ingest/users.jsonl", kept);
  write_table(out_ / "ingest/photos.jsonl", kept_photos);
  write_table(out_ / "ingest/comments.jsonl", kept_comments);
  write_rejects(out_ / "ingest/rejects_users.jsonl", "users", users.rejects);
  write_rejects(out_ / "ingest/rejects_photos.jsonl", "photos", photos.rejects);
  write_rejects(out_ / "ingest/rejects_comments.jsonl", "comments", comments.rejects);

  ordered_json summary;
  summary["users_loaded"] = users.rows.size() + users.rejects.size();
  summary["users_rejected"] = users.rejects.size();
  summary["users_after_activity_filter"] = after_filter;
  summary["users_after_trim"] = kept.size();
  summary["photos_loaded"] = photos.rows.size() + photos.rejects.size();
  summary["photos_rejected"] = photos.rejects.size();
  summary["photos_retained"] = kept_photos.size();
  summary["comments_loaded"] = comments.rows.size() + comments.rejects.size();
  summary["comments_rejected"] = comments.rejects.size();
  summary["comments_retained"] = kept_comments.size();
  write_file(out_ / "ingest/summary.json", summary.dump(2) + "\n");
  log_info("ingest: " + std::to_string(kept.size()) + " users, " + std::to_string(kept_photos.size()) + " photos, " +
           std::to_string(kept_comments.size()) + " comments retained");

  return {"ingest/users.jsonl",          "ingest/photos.jsonl",          "ingest/comments.jsonl",
          "ingest/rejects_users.jsonl",  "ingest/rejects_photos.jsonl",  "ingest/rejects_comments.jsonl",
          "ingest/summary.json"};
}

std::vector<std::string> Pipeline::do_textprep() {
  const WordSet stopwords = load_word_set(cfg_.data.stopwords);
  const EmojiMap emoji = EmojiMap::load(cfg_.data.emoji);
  const CommentTable comments = load_table<CommentRecord>(out_ / "ingest/comments.jsonl");
  const TextprepResult r = normalize_comments(comments.rows, stopwords, emoji);
  write_clean_comments(out_ / "textprep/clean_comments.jsonl", r.kept);
  write_dropped(out_ / "textprep/dropped.jsonl", r.dropped);
  log_info("textprep: kept " + std::to_string(r.kept.size()) + ", dropped " + std::to_string(r.dropped.size()));
  return {"textprep/clean_comments.jsonl", "textprep/dropped.jsonl"};
}

std::vector<std::string> Pipeline::do_textfeat() {
  TextResources res;
  res.lexicon = SentimentLexicon::load(cfg_.data.lexicon);
  res.easy_words = load_word_set(cfg_.data.easy_words);
  res.seconds_per_char = cfg_.reading_seconds_per_char;
  const auto clean = read_clean_comments(out_ / "textprep/clean_comments.jsonl");
  write_comment_features(out_ / "textfeat/comment_features.jsonl", compute_features(clean, res));
  return {"textfeat/comment_features.jsonl"};
}

std::vector<std::string> Pipeline::do_label() {
  const fs::path source = label_source_ ? *label_source_ : out_ / "ingest/users.jsonl";
  const UserTable users = load_table<UserRecord>(source);
  if (!users.rejects.empty())
    log_warn("label: " + std::to_string(users.rejects.size()) + " user rows rejected while loading " + source.string());
  const LabelVector labels = label_users(users.rows);
  write_labels(out_ / "label/labels.jsonl", labels);
  ordered_json summary;
  summary["users"] = labels.labels.size();
  summary["professional"] = labels.positive_count;
  summary["prevalence"] = labels.prevalence;
  // Which term fired, for auditing substring false positives.
  auto& by_term = summary["matches_by_term"] = ordered_json::object();
  for (auto term : kPhotographyTerms) {
    const auto n = std::count_if(labels.labels.begin(), labels.labels.end(),
                                 [&](const UserLabel& l) { return l.matched_term == term; });
    by_term[std::string(term)] = n;
  }
  write_file(out_ / "label/summary.json", summary.dump(2) + "\n");
  log_info("label: " + std::to_string(labels.positive_count) + " of " + std::to_string(labels.labels.size()) +
           " users professional");
  return {"label/labels.jsonl", "label/summary.json"};
}

std::vector<std::string> Pipeline::do_featurize() {
  const UserTable users = load_table<UserRecord>(out_ / "ingest/users.jsonl");
  const PhotoTable photos = load_table<PhotoRecord>(out_ / "ingest/photos.jsonl");
  const CommentTable comments = load_table<CommentRecord>(out_ / "ingest/comments.jsonl");
  const auto features = read_comment_features(out_ / "textfeat/comment_features.jsonl");
  AggregationOptions options;
  options.zero_comment_photos_as_zero = cfg_.zero_comment_photos_as_zero;
  const auto aggregates = aggregate_user(photos.rows, features, cfg_.snapshot, options, comments.rows);
  std::vector<std::string> outputs;
  for (auto id : kAllFeatureSets) {
    const FeatureMatrix m = assemble(id, aggregates, users.rows, cfg_.snapshot);
    write_feature_matrix(out_ / feature_matrix_path(id), m);
    outputs.push_back(feature_matrix_path(id));
    outputs.push_back(feature_manifest_path(id));
  }
  return outputs;
}

std::vector<std::string> Pipeline::do_evaluate() {
  const LabelVector labels = read_labels(out_ / "label/labels.jsonl");
  std::vector<std::string> outputs;
  for (auto id : cfg_.feature_sets) {
    const FeatureMatrix m = read_feature_matrix(out_ / feature_matrix_path(id));
    const std::vector<int> y = labels.lookup(m.row_ids);
    for (auto kind : cfg_.models) {
      const learn::ModelSpec spec = cfg_.model_spec(kind);
      log_info("evaluate: " + std::string(learn::to_string(kind)) + " on " + std::string(to_string(id)));
      const learn::CvResult r = learn::cross_validate(spec, m.values, y, cfg_.k, cfg_.seed, std::string(to_string(id)));
      write_file(out_ / evaluation_path(id, kind), learn::to_json(r.report, &spec).dump(2) + "\n");
      write_oof(out_ / oof_path(id, kind), m, y, r.oof_scores);
      outputs.push_back(evaluation_path(id, kind));
      outputs.push_back(oof_path(id, kind));
    }
  }
  const FeatureMatrix all = read_feature_matrix(out_ / feature_matrix_path(FeatureSetId::all));
  const std::vector<int> y = labels.lookup(all.row_ids);
  const learn::ModelSpec spec = cfg_.model_spec(cfg_.group_model);
  for (const auto& [group, columns] : {std::pair{kAestheticTechnical, aesthetic_technical_columns()},
                                       std::pair{kSocialActivity, social_activity_columns()}}) {
    const FeatureMatrix sub = select_columns(all, columns, group);
    log_info("evaluate: " + std::string(learn::to_string(cfg_.group_model)) + " on " + group);
    const learn::CvResult r = learn::cross_validate(spec, sub.values, y, cfg_.k, cfg_.seed, group);
    write_file(out_ / group_path(group), learn::to_json(r.report, &spec).dump(2) + "\n");
    outputs.push_back(group_path(group));
  }
  return outputs;
}

std::vector<std::string> Pipeline::do_correlate() {
  const FeatureMatrix all = read_feature_matrix(out_ / feature_matrix_path(FeatureSetId::all));
  std::vector<std::string> columns = aesthetic_technical_columns();
  for (auto& c : social_activity_columns()) columns.push_back(c);
  const FeatureMatrix sub = select_columns(all, columns, "correlation");
  const stats::CorrelationMatrix c = stats::pearson_matrix(sub.values, sub.column_names);
  stats::write_correlation_csv(out_ / "correlate/correlation.csv", c);
  stats::write_correlation_long_csv(out_ / "correlate/correlation_long.csv", c);
  return {"correlate/correlation.csv", "correlate/correlation_long.csv"};
}

std::vector<std::string> Pipeline::do_characterize() {
  const auto& cc = cfg_.characterize;
  const FeatureMatrix m = read_feature_matrix(out_ / feature_matrix_path(cc.matrix));
  std::vector<int> classes;
  if (cc.labels == "predicted") {
    const auto scores = read_oof_scores(out_ / oof_path(cc.feature_set, cc.model), m.row_ids);
    for (double s : scores) classes.push_back(s > learn::kDecisionThreshold ? 1 : 0);
  } else {
    classes = read_labels(out_ / "label/labels.jsonl").lookup(m.row_ids);
  }
  stats::CharacterizationReport r = stats::characterize(classes, m, cc.labels);
  if (cc.labels == "predicted")
    r.prediction_source = std::string(learn::to_string(cc.model)) + " on " + std::string(to_string(cc.feature_set));
  write_file(out_ / "characterize/characterization.json", stats::to_json(r).dump(2) + "\n");
  write_file(out_ / "characterize/characterization.md", stats::to_markdown(r));
  stats::write_anova_csv(out_ / "characterize/anova.csv", r);
  stats::write_characterization_bars_csv(out_ / "characterize/characterization_bars.csv", r);
  return {"characterize/characterization.json", "characterize/characterization.md", "characterize/anova.csv",
          "characterize/characterization_bars.csv"};
}

std::vector<std::string> Pipeline::do_reports() {
  auto load = [&](const std::string& rel) { return learn::eval_report_from_json(json::parse(read_file(out_ / rel))); };
  auto metric_cells = [](const learn::EvalReport& r) {
    return std::vector<std::string>{stats::format_number(r.accuracy), stats::format_number(r.auc),
                                    stats::format_number(r.f1), stats::format_number(r.f1_weighted)};
  };

  std::ostringstream grid_csv, grid_md;
  csv::write_row(grid_csv, {"feature_set", "model", "accuracy", "auc", "f1", "f1_weighted"});
  grid_md << "| Feature set | Model | Accuracy | AUC | F1 | F1 (weighted) |\n|---|---|---|---|---|---|\n";
  for (auto id : cfg_.feature_sets) {
    for (auto kind : cfg_.models) {
      const auto r = load(evaluation_path(id, kind));
      std::vector<std::string> row{std::string(to_string(id)), std::string(learn::to_string(kind))};
      for (auto& cell : metric_cells(r)) row.push_back(cell);
      csv::write_row(grid_csv, row);
      grid_md << "| " << to_string(id) << " | " << learn::display_name(kind) << " | " << fixed4(r.accuracy) << " | "
           << fixed4(r.auc) << " | " << fixed4(r.f1) << " | " << fixed4(r.f1_weighted) << " |\n";
    }
  }

  std::ostringstream groups_csv, groups_md;
  csv::write_row(groups_csv, {"feature_group", "model", "accuracy", "auc", "f1", "f1_weighted"});
  groups_md << "| Feature group | Model | Accuracy | AUC | F1 | F1 (weighted) |\n|---|---|---|---|---|---|\n";
  for (const char* group : {kAestheticTechnical, kSocialActivity}) {
    const auto r = load(group_path(group));
    std::vector<std::string> row{group, std::string(learn::to_string(r.model))};
    for (auto& cell : metric_cells(r)) row.push_back(cell);
    csv::write_row(groups_csv, row);
    groups_md << "| " << group << " | " << learn::display_name(r.model) << " | " << fixed4(r.accuracy) << " | "
         << fixed4(r.auc) << " | " << fixed4(r.f1) << " | " << fixed4(r.f1_weighted) << " |\n";
  }

  write_file(out_ / "reports/model_grid.csv", grid_csv.str());
  write_file(out_ / "reports/model_grid.md", grid_md.str());
  write_file(out_ / "reports/feature_groups.csv", groups_csv.str());
  write_file(out_ / "reports/feature_groups.md", groups_md.str());
  return {"reports/model_grid.csv", "reports/model_grid.md", "reports/feature_groups.csv", "reports/feature_groups.md"};
}

}  // namespace lenslevel
