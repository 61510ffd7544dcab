#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "lenslevel/textfeat.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lenslevel;

namespace {

CleanComment clean(std::vector<std::string> tokens) {
  CleanComment c;
  c.comment_id = "c";
  c.photo_id = "p";
  for (const auto& t : tokens) c.char_text += (c.char_text.empty() ? "" : " ") + t;
  c.tokens = std::move(tokens);
  return c;
}

SentimentLexicon hand_lexicon() {
  SentimentLexicon lex;
  lex.add("great", {0.8, 0.75});
  lex.add("terrible", {-0.8, 0.75});
  lex.add("beautiful", {0.85, 1.0});
  return lex;
}

}  // namespace

TEST_SUITE("textfeat") {
  TEST_CASE("sentiment is the mean over lexicon hits") {
    const auto lex = hand_lexicon();
    auto s = sentiment(clean({"great", "shot"}), lex);
    CHECK(s.polarity == doctest::Approx(0.8));
    CHECK(s.subjectivity == doctest::Approx(0.75));
    s = sentiment(clean({"great", "terrible"}), lex);
    CHECK(s.polarity == doctest::Approx(0.0));
    CHECK(s.subjectivity == doctest::Approx(0.75));
    s = sentiment(clean({"tripod"}), lex);
    CHECK(s.polarity == 0.0);
    CHECK(s.subjectivity == 0.0);
    CHECK(lex.find("GREAT") != nullptr);
    SentimentLexicon bad;
    CHECK_THROWS_AS(bad.add("x", {1.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(bad.add("x", {0.5, -0.1}), ValidationError);
  }

  TEST_CASE("bundled lexicon scores stay in range") {
    const auto lex = SentimentLexicon::load(std::filesystem::path(LENSLEVEL_DATA_DIR) / "sentiment_lexicon.tsv");
    CHECK(lex.size() > 1000);
    const auto* e = lex.find("beautiful");
    REQUIRE(e != nullptr);
    CHECK(e->polarity > 0.5);
  }

  TEST_CASE("syllable heuristic") {
    CHECK(count_syllables("photography") == 4);
    CHECK(count_syllables("beautiful") == 3);
    CHECK(count_syllables("make") == 1);
    CHECK(count_syllables("the") == 1);
    CHECK(count_syllables("free") == 1);
    CHECK(count_syllables("rhythm") == 1);
    CHECK(count_syllables("123") == 1);
  }

  TEST_CASE("difficult words are distinct, long and not easy") {
    const WordSet easy{"beautiful"};
    CHECK(difficult_words(clean({"beautiful", "photography", "photography", "make"}), easy) == 1);
    CHECK(difficult_words(clean({"beautiful", "photography"}), {}) == 2);
    CHECK(difficult_words(clean({"nice"}), easy) == 0);
  }

  TEST_CASE("reading time is linear in characters") {
    CleanComment c;
    CHECK(reading_time(c) == 0.0);
    c.char_text = "x";
    CHECK(reading_time(c) == doctest::Approx(0.01469).epsilon(1e-12));
    c.char_text = std::string(100, 'x');
    CHECK(reading_time(c) == doctest::Approx(1.469).epsilon(1e-12));
    c.char_text = "é";
    CHECK(reading_time(c, 2.0) == 2.0);
  }

  TEST_CASE("entropy examples") {
    CHECK(entropy("aaaa") == 0.0);
    CHECK(entropy("ab") == doctest::Approx(1.0));
    CHECK(entropy("abcd") == doctest::Approx(2.0));
    CHECK(entropy("ééab") == doctest::Approx(1.5));
    CHECK_THROWS(entropy(""));
  }

  TEST_CASE("entropy matches the oracle and its bounds") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; ++i) {
      std::string s;
      const std::size_t alphabet = 1 + rng() % 26;
      for (std::size_t n = 1 + rng() % 60; n > 0; --n) s += static_cast<char>('a' + rng() % alphabet);
      const double h = entropy(s);
      CHECK(h == doctest::Approx(oracle::entropy_ascii(s)).epsilon(1e-12));
      std::set<char> distinct(s.begin(), s.end());
      CHECK(h >= 0.0);
      CHECK(h <= std::log2(static_cast<double>(distinct.size())) + 1e-12);
      std::string shuffled = s;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(entropy(shuffled) == doctest::Approx(h).epsilon(1e-12));
    }
  }

  TEST_CASE("comment length counts raw codepoints") {
    CHECK(comment_length({"c", "p", "❤️x"}) == 3);
    CHECK(comment_length({"c", "p", ""}) == 0);
    CHECK(comment_length({"c", "p", "Très"}) == 4);
  }

  TEST_CASE("per-comment features round-trip through jsonl") {
    TextResources res;
    res.lexicon = hand_lexicon();
    auto c = clean({"great", "photography"});
    c.original_length = 20;
    const auto f = compute_features(c, res);
    CHECK(f.polarity == doctest::Approx(0.8));
    CHECK(f.difficult_words == 1);
    CHECK(f.length_chars == 20);
    CHECK(f.reading_time_s == doctest::Approx(17 * kReadingSecondsPerChar));
    testutil::TempDir dir;
    write_comment_features(dir / "f.jsonl", {f});
    const auto back = read_comment_features(dir / "f.jsonl");
    REQUIRE(back.size() == 1);
    CHECK(back[0].comment_id == "c");
    CHECK(back[0].entropy_bits == f.entropy_bits);
    CHECK(back[0].reading_time_s == f.reading_time_s);
  }
}
