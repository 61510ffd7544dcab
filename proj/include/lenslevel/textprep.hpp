#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "lenslevel/dataset.hpp"

namespace lenslevel {

using WordSet = std::unordered_set<std::string>;

// One word per line; blank lines and '#' comments ignored; entries lowercased.
WordSet load_word_set(const std::filesystem::path& path);

// Codepoint-sequence -> short name table with longest-match lookup.
class EmojiMap {
 public:
  EmojiMap() = default;

  // Lines of "<hex codepoints separated by spaces>\t<name>".
  static EmojiMap load(const std::filesystem::path& path);

  void add(std::u32string_view sequence, std::string name, bool replace = true);

  // Length (in codepoints) of the longest entry starting at text[pos], 0 if none.
  // On a match, *name receives the entry's name.
  std::size_t match(std::u32string_view text, std::size_t pos, const std::string** name) const;

  std::size_t size() const { return entries_; }

 private:
  struct Node {
    std::unordered_map<char32_t, std::size_t> next;
    int name = -1;
  };
  std::vector<Node> nodes_{Node{}};
  std::vector<std::string> names_;
  std::size_t entries_ = 0;
};

struct CleanComment {
  std::string comment_id;
  std::string photo_id;
  std::vector<std::string> tokens;
  std::string char_text;
  std::size_t original_length = 0;  // codepoints in the raw text

  friend bool operator==(const CleanComment&, const CleanComment&) = default;
};

struct Dropped {
  std::string comment_id;
  std::string reason;  // "empty" or "stopwords-only"
};

// Steps 1-5 of normalisation: lowercase, emoji -> " name ", strip hyperlinks,
// non-alphanumerics -> space, collapse whitespace.
std::string normalize_text(std::string_view raw, const EmojiMap& emoji);

// Full pipeline, including the drop rule for empty and stopword-only comments.
std::variant<CleanComment, Dropped> normalize_comment(const CommentRecord& raw, const WordSet& stopwords,
                                                      const EmojiMap& emoji);

struct TextprepResult {
  std::vector<CleanComment> kept;
  std::vector<Dropped> dropped;
};

TextprepResult normalize_comments(const std::vector<CommentRecord>& comments, const WordSet& stopwords,
                                  const EmojiMap& emoji);

void write_clean_comments(const std::filesystem::path& path, const std::vector<CleanComment>& comments);
std::vector<CleanComment> read_clean_comments(const std::filesystem::path& path);
void write_dropped(const std::filesystem::path& path, const std::vector<Dropped>& dropped);

}  // namespace lenslevel
