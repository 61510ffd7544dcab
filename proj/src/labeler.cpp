#include "lenslevel/labeler.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "lenslevel/digest.hpp"
#include "lenslevel/unicode.hpp"

namespace lenslevel {

std::optional<std::string_view> matched_photography_term(std::string_view occupation) {
  if (occupation.empty()) return std::nullopt;
  const std::string lowered = unicode::to_lower(occupation);
  for (auto term : kPhotographyTerms)
    if (lowered.find(term) != std::string::npos) return term;
  return std::nullopt;
}

bool is_photography_occupation(std::string_view occupation) {
  return matched_photography_term(occupation).has_value();
}

std::vector<int> LabelVector::lookup(const std::vector<std::string>& ids) const {
  std::unordered_map<std::string_view, int> index;
  index.reserve(labels.size());
  for (const auto& l : labels) index.emplace(l.user_id, l.is_professional ? 1 : 0);
  std::vector<int> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) throw ValidationError("no label for user '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

LabelVector label_users(const std::vector<UserRecord>& users) {
  if (users.empty()) throw ValidationError("cannot label an empty user table");
  LabelVector out;
  out.labels.reserve(users.size());
  for (const auto& u : users) {
    UserLabel l{u.user_id, false, {}};
    if (auto term = matched_photography_term(u.occupation)) {
      l.is_professional = true;
      l.matched_term = std::string(*term);
      ++out.positive_count;
    }
    out.labels.push_back(std::move(l));
  }
  std::sort(out.labels.begin(), out.labels.end(),
            [](const UserLabel& a, const UserLabel& b) { return a.user_id < b.user_id; });
  out.prevalence = static_cast<double>(out.positive_count) / static_cast<double>(users.size());
  return out;
}

void write_labels(const std::filesystem::path& path, const LabelVector& labels) {
  std::ostringstream out;
  for (const auto& l : labels.labels) {
    nlohmann::ordered_json j{{"user_id", l.user_id}, {"is_professional", l.is_professional}};
    j["matched_term"] = l.matched_term.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(l.matched_term);
    out << j.dump() << '\n';
  }
  write_file(path, out.str());
}

LabelVector read_labels(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  LabelVector out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      UserLabel l;
      l.user_id = j.at("user_id").get<std::string>();
      l.is_professional = j.at("is_professional").get<bool>();
      if (j.contains("matched_term") && j["matched_term"].is_string()) l.matched_term = j["matched_term"];
      if (l.is_professional) ++out.positive_count;
      out.labels.push_back(std::move(l));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.labels.empty()) throw ValidationError(path.string() + ": no labels");
  std::sort(out.labels.begin(), out.labels.end(),
            [](const UserLabel& a, const UserLabel& b) { return a.user_id < b.user_id; });
  out.prevalence = static_cast<double>(out.positive_count) / static_cast<double>(out.labels.size());
  return out;
}

}  // namespace lenslevel
