#include <doctest.h>

#include <random>

#include "lenslevel/labeler.hpp"
#include "lenslevel/unicode.hpp"
#include "test_util.hpp"

using namespace lenslevel;

namespace {

UserRecord user(std::string id, std::string occupation) {
  UserRecord u;
  u.user_id = std::move(id);
  u.occupation = std::move(occupation);
  return u;
}

std::string upper(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return out;
}

}  // namespace

TEST_SUITE("labeler") {
  TEST_CASE("occupation examples") {
    CHECK(is_photography_occupation("Freelance Photographer"));
    CHECK(is_photography_occupation("fotógrafo"));
    CHECK(is_photography_occupation("valokuvaaja"));
    CHECK(is_photography_occupation("Bildredakteur"));
    CHECK(is_photography_occupation("ljósmyndari"));
    CHECK(is_photography_occupation("LJÓSMYNDARI"));
    CHECK_FALSE(is_photography_occupation("software engineer"));
    CHECK_FALSE(is_photography_occupation(""));
    CHECK(matched_photography_term("Photographer").value() == "phot");
    CHECK(matched_photography_term("fotograf").value() == "fot");
    CHECK_FALSE(matched_photography_term("teacher").has_value());
  }

  TEST_CASE("substring matching also catches related occupations") {
    CHECK(is_photography_occupation("Motion picture editor"));
    CHECK(is_photography_occupation("Bildhauer"));
  }

  TEST_CASE("labelling is case-insensitive") {
    std::mt19937_64 rng(31);
    const std::vector<std::string> words{"photo", "teacher", "fot", "bild", "nurse", "ritratto", "x", "pictures", " "};
    for (int i = 0; i < 500; ++i) {
      std::string occ;
      for (std::size_t k = rng() % 4; k > 0; --k) occ += words[rng() % words.size()];
      CHECK(is_photography_occupation(occ) == is_photography_occupation(upper(occ)));
    }
  }

  TEST_CASE("appending text never removes a match") {
    std::mt19937_64 rng(32);
    const std::vector<std::string> words{"photo", "teach", "fot", "bil", "d", "nuotrauk", "er", "ritr", "att"};
    for (int i = 0; i < 500; ++i) {
      std::string occ;
      for (std::size_t k = rng() % 4; k > 0; --k) occ += words[rng() % words.size()];
      const std::string extra = words[rng() % words.size()];
      if (is_photography_occupation(occ)) {
        CHECK(is_photography_occupation(occ + extra));
        CHECK(is_photography_occupation(extra + occ));
      }
    }
  }

  TEST_CASE("label vector bookkeeping") {
    const auto labels = label_users({user("u3", "Photographer"), user("u1", "teacher"), user("u2", ""),
                                     user("u4", "student")});
    CHECK(labels.positive_count == 1);
    CHECK(labels.prevalence == 0.25);
    REQUIRE(labels.labels.size() == 4);
    CHECK(labels.labels[0].user_id == "u1");
    CHECK(labels.labels[2].matched_term == "phot");
    CHECK(labels.lookup({"u3", "u1"}) == std::vector<int>{1, 0});
    CHECK_THROWS_AS(labels.lookup({"nobody"}), ValidationError);
    CHECK_THROWS_AS(label_users({}), ValidationError);

    testutil::TempDir dir;
    write_labels(dir / "labels.jsonl", labels);
    const auto back = read_labels(dir / "labels.jsonl");
    CHECK(back.labels == labels.labels);
    CHECK(back.positive_count == 1);
  }
}
