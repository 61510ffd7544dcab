#include "lenslevel/textprep.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lenslevel/digest.hpp"
#include "lenslevel/unicode.hpp"

namespace lenslevel {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_ascii_lower_or_digit(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'0' && c <= U'9'); }

bool is_scheme_char(char32_t c) { return is_ascii_lower_or_digit(c) || c == U'+' || c == U'.' || c == U'-'; }

// Replaces "scheme://..." and "www...." spans, up to the next whitespace, with a space.
std::u32string strip_hyperlinks(const std::u32string& text) {
  std::vector<bool> erase(text.size(), false);
  const std::size_t n = text.size();

  for (std::size_t i = 0; i + 2 < n; ++i) {
    if (text[i] != U':' || text[i + 1] != U'/' || text[i + 2] != U'/') continue;
    std::size_t start = i;
    while (start > 0 && is_scheme_char(text[start - 1])) --start;
    // A scheme begins with a letter.
    while (start < i && !(text[start] >= U'a' && text[start] <= U'z')) ++start;
    if (start == i) continue;
    std::size_t end = i + 3;
    while (end < n && !unicode::is_space(text[end])) ++end;
    std::fill(erase.begin() + static_cast<std::ptrdiff_t>(start), erase.begin() + static_cast<std::ptrdiff_t>(end),
              true);
    i = end;
  }

  for (std::size_t i = 0; i + 3 < n; ++i) {
    if (text.compare(i, 4, U"www.") != 0) continue;
    if (i > 0 && unicode::is_alnum(text[i - 1])) continue;
    std::size_t end = i + 4;
    while (end < n && !unicode::is_space(text[end])) ++end;
    std::fill(erase.begin() + static_cast<std::ptrdiff_t>(i), erase.begin() + static_cast<std::ptrdiff_t>(end), true);
    i = end;
  }

  std::u32string out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!erase[i]) {
      out.push_back(text[i]);
    } else if (i == 0 || !erase[i - 1]) {
      out.push_back(U' ');
    }
  }
  return out;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find(' ', pos);
    const auto stop = end == std::string::npos ? text.size() : end;
    if (stop > pos) tokens.emplace_back(text.substr(pos, stop - pos));
    pos = stop + 1;
  }
  return tokens;
}

}  // namespace

WordSet load_word_set(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    words.insert(unicode::to_lower(std::string_view(line).substr(first, last - first + 1)));
  }
  return words;
}

EmojiMap EmojiMap::load(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  EmojiMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected '<codepoints>\\t<name>'");
    std::u32string seq;
    std::istringstream cps(line.substr(0, tab));
    std::string hex;
    while (cps >> hex) {
      std::uint32_t cp = 0;
      auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
      if (ec != std::errc{} || ptr != hex.data() + hex.size())
        throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": bad codepoint '" + hex + "'");
      seq.push_back(static_cast<char32_t>(cp));
    }
    std::string name = unicode::to_lower(line.substr(tab + 1));
    std::erase(name, ':');
    // Lookup runs after lowercasing, and a few emoji (e.g. U+24C2) have lowercase forms.
    const std::u32string lowered = unicode::to_lower(seq);
    if (lowered != seq) map.add(lowered, name, false);
    map.add(seq, std::move(name));
  }
  return map;
}

void EmojiMap::add(std::u32string_view sequence, std::string name, bool replace) {
  if (sequence.empty()) return;
  std::size_t node = 0;
  for (char32_t cp : sequence) {
    auto it = nodes_[node].next.find(cp);
    if (it == nodes_[node].next.end()) {
      nodes_.push_back(Node{});
      const std::size_t child = nodes_.size() - 1;
      nodes_[node].next.emplace(cp, child);
      node = child;
    } else {
      node = it->second;
    }
  }
  if (nodes_[node].name < 0) {
    ++entries_;
    names_.push_back(std::move(name));
    nodes_[node].name = static_cast<int>(names_.size() - 1);
  } else if (replace) {
    names_[static_cast<std::size_t>(nodes_[node].name)] = std::move(name);
  }
}

std::size_t EmojiMap::match(std::u32string_view text, std::size_t pos, const std::string** name) const {
  std::size_t node = 0;
  std::size_t best = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    auto it = nodes_[node].next.find(text[i]);
    if (it == nodes_[node].next.end()) break;
    node = it->second;
    if (nodes_[node].name >= 0) {
      best = i - pos + 1;
      if (name) *name = &names_[static_cast<std::size_t>(nodes_[node].name)];
    }
  }
  return best;
}

std::string normalize_text(std::string_view raw, const EmojiMap& emoji) {
  // (1) lowercase
  const std::u32string lowered = unicode::to_lower(unicode::decode_utf8(raw));

  // (2) emoji -> " short name "
  std::u32string named;
  named.reserve(lowered.size());
  for (std::size_t i = 0; i < lowered.size();) {
    const std::string* name = nullptr;
    const std::size_t len = emoji.match(lowered, i, &name);
    if (len > 0) {
      named.push_back(U' ');
      named += unicode::decode_utf8(*name);
      named.push_back(U' ');
      i += len;
    } else {
      named.push_back(lowered[i++]);
    }
  }

  // (3) hyperlinks
  const std::u32string unlinked = strip_hyperlinks(named);

  // (4) non-alphanumerics -> space, (5) collapse whitespace
  std::u32string out;
  out.reserve(unlinked.size());
  for (char32_t c : unlinked) {
    if (unicode::is_alnum(c)) {
      out.push_back(c);
    } else if (!out.empty() && out.back() != U' ') {
      out.push_back(U' ');
    }
  }
  if (!out.empty() && out.back() == U' ') out.pop_back();
  return unicode::encode_utf8(out);
}

std::variant<CleanComment, Dropped> normalize_comment(const CommentRecord& raw, const WordSet& stopwords,
                                                      const EmojiMap& emoji) {
  CleanComment clean;
  clean.comment_id = raw.comment_id;
  clean.photo_id = raw.photo_id;
  clean.original_length = unicode::codepoint_count(raw.raw_text);
  clean.char_text = normalize_text(raw.raw_text, emoji);
  clean.tokens = split_tokens(clean.char_text);

  // (6) drop rule
  if (clean.tokens.empty()) return Dropped{raw.comment_id, "empty"};
  const bool all_stop =
      std::all_of(clean.tokens.begin(), clean.tokens.end(), [&](const std::string& t) { return stopwords.count(t) > 0; });
  if (all_stop) return Dropped{raw.comment_id, "stopwords-only"};
  return clean;
}

TextprepResult normalize_comments(const std::vector<CommentRecord>& comments, const WordSet& stopwords,
                                  const EmojiMap& emoji) {
  TextprepResult result;
  for (const auto& c : comments) {
    auto r = normalize_comment(c, stopwords, emoji);
    if (auto* kept = std::get_if<CleanComment>(&r)) {
      result.kept.push_back(std::move(*kept));
    } else {
      result.dropped.push_back(std::get<Dropped>(std::move(r)));
    }
  }
  auto by_id = [](const auto& a, const auto& b) { return a.comment_id < b.comment_id; };
  std::sort(result.kept.begin(), result.kept.end(), by_id);
  std::sort(result.dropped.begin(), result.dropped.end(), by_id);
  return result;
}

void write_clean_comments(const std::filesystem::path& path, const std::vector<CleanComment>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) {
    ordered_json j{{"comment_id", c.comment_id},
                   {"photo_id", c.photo_id},
                   {"tokens", c.tokens},
                   {"char_text", c.char_text},
                   {"original_length", c.original_length}};
    out << j.dump() << '\n';
  }
  write_file(path, out.str());
}

std::vector<CleanComment> read_clean_comments(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<CleanComment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CleanComment c;
      c.comment_id = j.at("comment_id").get<std::string>();
      c.photo_id = j.at("photo_id").get<std::string>();
      c.tokens = j.at("tokens").get<std::vector<std::string>>();
      c.char_text = j.at("char_text").get<std::string>();
      c.original_length = j.at("original_length").get<std::size_t>();
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_dropped(const std::filesystem::path& path, const std::vector<Dropped>& dropped) {
  std::ostringstream out;
  for (const auto& d : dropped) out << ordered_json{{"comment_id", d.comment_id}, {"reason", d.reason}}.dump() << '\n';
  write_file(path, out.str());
}

}  // namespace lenslevel
