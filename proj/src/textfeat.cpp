#include "lenslevel/textfeat.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lenslevel/digest.hpp"
#include "lenslevel/unicode.hpp"

namespace lenslevel {

namespace {

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
      return true;
    default:
      return false;
  }
}

double parse_score(const std::string& s, const std::filesystem::path& path, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": bad score '" + s + "'");
  }
}

}  // namespace

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  SentimentLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string word, pol, subj;
    if (!std::getline(fields, word, '\t') || !std::getline(fields, pol, '\t') || !std::getline(fields, subj, '\t'))
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected word\\tpolarity\\tsubjectivity");
    lex.add(word, {parse_score(pol, path, line_no), parse_score(subj, path, line_no)});
  }
  return lex;
}

void SentimentLexicon::add(std::string_view word, LexiconEntry entry) {
  if (!(entry.polarity >= -1.0 && entry.polarity <= 1.0) || !(entry.subjectivity >= 0.0 && entry.subjectivity <= 1.0))
    throw ValidationError("lexicon entry '" + std::string(word) + "' out of bounds");
  entries_[unicode::to_lower(word)] = entry;
}

const LexiconEntry* SentimentLexicon::find(std::string_view word) const {
  auto it = entries_.find(unicode::to_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

Sentiment sentiment(const CleanComment& c, const SentimentLexicon& lex) {
  double pol = 0.0, subj = 0.0;
  std::size_t hits = 0;
  for (const auto& t : c.tokens) {
    if (const auto* e = lex.find(t)) {
      pol += e->polarity;
      subj += e->subjectivity;
      ++hits;
    }
  }
  if (hits == 0) return {};
  return {pol / static_cast<double>(hits), subj / static_cast<double>(hits)};
}

std::size_t count_syllables(std::string_view word) {
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : word) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  // Silent trailing 'e': a lone 'e' after a non-vowel ("make", not "free").
  const std::size_t n = word.size();
  if (groups > 1 && n >= 2 && word[n - 1] == 'e' && !is_vowel(word[n - 2])) --groups;
  return groups == 0 ? 1 : groups;
}

std::size_t difficult_words(const CleanComment& c, const WordSet& easy_words) {
  std::unordered_set<std::string_view> seen;
  std::size_t count = 0;
  for (const auto& t : c.tokens) {
    if (!seen.insert(t).second) continue;
    if (count_syllables(t) >= 3 && !easy_words.count(t)) ++count;
  }
  return count;
}

double reading_time(const CleanComment& c, double seconds_per_char) {
  return static_cast<double>(unicode::codepoint_count(c.char_text)) * seconds_per_char;
}

double entropy(std::string_view utf8) {
  const std::u32string text = unicode::decode_utf8(utf8);
  if (text.empty()) throw Error("entropy of an empty text is undefined");
  std::map<char32_t, std::size_t> freq;
  for (char32_t ch : text) ++freq[ch];
  const double n = static_cast<double>(text.size());
  double h = 0.0;
  for (const auto& [ch, k] : freq) {
    const double p = static_cast<double>(k) / n;
    h -= p * std::log2(p);
  }
  // -0.0 for a single symbol
  return h <= 0.0 ? 0.0 : h;
}

double entropy(const CleanComment& c) { return entropy(c.char_text); }

std::size_t comment_length(const CommentRecord& raw) { return unicode::codepoint_count(raw.raw_text); }

CommentFeatures compute_features(const CleanComment& c, const TextResources& res) {
  CommentFeatures f;
  f.comment_id = c.comment_id;
  f.photo_id = c.photo_id;
  const auto s = sentiment(c, res.lexicon);
  f.polarity = s.polarity;
  f.subjectivity = s.subjectivity;
  f.difficult_words = difficult_words(c, res.easy_words);
  f.reading_time_s = reading_time(c, res.seconds_per_char);
  f.entropy_bits = entropy(c);
  f.length_chars = c.original_length;
  return f;
}

std::vector<CommentFeatures> compute_features(const std::vector<CleanComment>& comments, const TextResources& res) {
  std::vector<CommentFeatures> out;
  out.reserve(comments.size());
  for (const auto& c : comments) out.push_back(compute_features(c, res));
  return out;
}

void write_comment_features(const std::filesystem::path& path, const std::vector<CommentFeatures>& rows) {
  std::ostringstream out;
  for (const auto& f : rows) {
    nlohmann::ordered_json j{{"comment_id", f.comment_id},         {"photo_id", f.photo_id},
                             {"polarity", f.polarity},             {"subjectivity", f.subjectivity},
                             {"difficult_words", f.difficult_words}, {"reading_time_s", f.reading_time_s},
                             {"entropy_bits", f.entropy_bits},     {"length_chars", f.length_chars}};
    out << j.dump() << '\n';
  }
  write_file(path, out.str());
}

std::vector<CommentFeatures> read_comment_features(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<CommentFeatures> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CommentFeatures f;
      f.comment_id = j.at("comment_id").get<std::string>();
      f.photo_id = j.at("photo_id").get<std::string>();
      f.polarity = j.at("polarity").get<double>();
      f.subjectivity = j.at("subjectivity").get<double>();
      f.difficult_words = j.at("difficult_words").get<std::size_t>();
      f.reading_time_s = j.at("reading_time_s").get<double>();
      f.entropy_bits = j.at("entropy_bits").get<double>();
      f.length_chars = j.at("length_chars").get<std::size_t>();
      out.push_back(std::move(f));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lenslevel
