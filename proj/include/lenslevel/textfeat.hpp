#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "lenslevel/textprep.hpp"

namespace lenslevel {

inline constexpr double kReadingSecondsPerChar = 0.01469;

struct LexiconEntry {
  double polarity = 0.0;      // [-1, 1]
  double subjectivity = 0.0;  // [0, 1]
};

class SentimentLexicon {
 public:
  SentimentLexicon() = default;

  // Lines of "word\tpolarity\tsubjectivity".
  static SentimentLexicon load(const std::filesystem::path& path);

  // Throws ValidationError when a score is out of bounds.
  void add(std::string_view word, LexiconEntry entry);
  // Case-insensitive.
  const LexiconEntry* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, LexiconEntry> entries_;
};

struct Sentiment {
  double polarity = 0.0;
  double subjectivity = 0.0;
};

struct CommentFeatures {
  std::string comment_id;
  std::string photo_id;
  double polarity = 0.0;
  double subjectivity = 0.0;
  std::size_t difficult_words = 0;
  double reading_time_s = 0.0;
  double entropy_bits = 0.0;
  std::size_t length_chars = 0;
};

// Mean polarity and subjectivity over tokens present in the lexicon; (0, 0) without hits.
Sentiment sentiment(const CleanComment& c, const SentimentLexicon& lex);

// Vowel-group heuristic: maximal runs of [aeiouy], minus one for a silent
// trailing 'e', never below 1.
std::size_t count_syllables(std::string_view word);

// Distinct tokens with at least three syllables that are not in easy_words.
std::size_t difficult_words(const CleanComment& c, const WordSet& easy_words);

double reading_time(const CleanComment& c, double seconds_per_char = kReadingSecondsPerChar);

// Shannon entropy (bits) of the character distribution of char_text. Throws on empty text.
double entropy(const CleanComment& c);
double entropy(std::string_view utf8);

// Codepoints in the raw, unnormalised text.
std::size_t comment_length(const CommentRecord& raw);

struct TextResources {
  SentimentLexicon lexicon;
  WordSet easy_words;
  double seconds_per_char = kReadingSecondsPerChar;
};

CommentFeatures compute_features(const CleanComment& c, const TextResources& res);
std::vector<CommentFeatures> compute_features(const std::vector<CleanComment>& comments, const TextResources& res);

void write_comment_features(const std::filesystem::path& path, const std::vector<CommentFeatures>& rows);
std::vector<CommentFeatures> read_comment_features(const std::filesystem::path& path);

}  // namespace lenslevel
