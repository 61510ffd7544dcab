#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lenslevel/dataset.hpp"

namespace lenslevel {

// Multilingual photography stems, matched as substrings of the lowercased occupation.
inline constexpr std::array<std::string_view, 13> kPhotographyTerms{
    "fot",    "phot",    "valokuv", "zdjęcie", "dealbh",      "bild",   "grianghraf",
    "nuotrauk", "pictur", "myndin", "billed",  "ljósmyndari", "ritratt"};

// First term (in kPhotographyTerms order) contained in the lowercased occupation.
std::optional<std::string_view> matched_photography_term(std::string_view occupation);
bool is_photography_occupation(std::string_view occupation);

struct UserLabel {
  std::string user_id;
  bool is_professional = false;
  std::string matched_term;  // empty when not professional

  friend bool operator==(const UserLabel&, const UserLabel&) = default;
};

struct LabelVector {
  std::vector<UserLabel> labels;  // sorted by user_id
  std::size_t positive_count = 0;
  double prevalence = 0.0;

  // Label of each id in `ids`; throws ValidationError for an unknown id.
  std::vector<int> lookup(const std::vector<std::string>& ids) const;
};

// Throws ValidationError on an empty table.
LabelVector label_users(const std::vector<UserRecord>& users);

void write_labels(const std::filesystem::path& path, const LabelVector& labels);
LabelVector read_labels(const std::filesystem::path& path);

}  // namespace lenslevel
