// Generates the bundled synthetic sample: 200 users with their photos and comments.
// Professionals (about 15%) get higher quality scores, views, groups and following
// counts so the models have signal to find. A few malformed rows exercise the
// rejects log.
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lenslevel/dataset.hpp"
#include "lenslevel/digest.hpp"
#include "lenslevel/learn/random.hpp"

namespace fs = std::filesystem;
using namespace lenslevel;
using std::chrono::days;

namespace {

constexpr std::size_t kUsers = 200;

const std::vector<std::string> kProfessionalOccupations{
    "Photographer",       "Freelance photographer", "fotógrafo profesional", "Photojournalist",
    "valokuvaaja",        "Fotograf",              "Wedding & portrait photography", "ljósmyndari",
    "Bildredakteur",      "Fotografa di ritratti", "Motion picture editor",  "PHOTO EDITOR"};

const std::vector<std::string> kOtherOccupations{
    "software engineer", "teacher", "", "nurse", "student", "retired", "architect", "", "accountant",
    "graphic designer",  "chef",    "", "musician", "civil servant", "lawyer", "doctor", "Bildhauer"};

const std::vector<std::string> kComments{
    "Great shot!",
    "Beautiful light 📷",
    "Wonderful composition, well done",
    "the and of",
    "",
    "👍👍",
    "❤️ love it",
    "Très belle photo !",
    "See more at https://example.com/gallery?id=12",
    "visit www.example.org/photos for prints",
    "Stunning colours and a marvellous atmosphere",
    "Terrible noise in the shadows, sorry",
    "nice",
    "Seen in the group: Landscapes of the world 🌄",
    "Absolutely extraordinary photography, congratulations",
    "is it?",
    "Fantastic detail 👨‍👩‍👧 family portrait",
    "   ",
    "Lovely, simple and elegant",
    "Interesting perspective on an ordinary street"};

struct Gen {
  learn::Rng rng{20211231};

  double normal(double mean, double sd) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng.uniform_index(static_cast<std::size_t>(hi - lo + 1)));
  }
  bool coin(double p) { return rng.uniform() < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[rng.uniform_index(v.size())]; }
};

std::string id(const char* prefix, std::size_t n, int width) {
  std::string digits = std::to_string(n);
  return prefix + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(digits.size(), width), '0') + digits;
}

void append_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures/sample");
  fs::create_directories(dir);
  Gen g;
  const Date first_join = parse_date("2005-01-01");
  const Date window_start = parse_date("2021-12-01");
  const Date reference = parse_date("2021-12-31");

  std::vector<UserRecord> users;
  std::vector<PhotoRecord> photos;
  std::vector<CommentRecord> comments;
  std::size_t photo_seq = 0, comment_seq = 0;

  for (std::size_t u = 1; u <= kUsers; ++u) {
    const bool pro = g.coin(0.15);
    UserRecord user;
    user.user_id = id("u", u, 4);
    user.occupation = pro ? g.pick(kProfessionalOccupations) : g.pick(kOtherOccupations);
    user.join_date = first_join + days(g.uniform_int(0, 6000));
    user.following_count = std::max<std::int64_t>(0, std::llround(std::exp(g.normal(pro ? 5.5 : 4.2, 1.0))));
    user.groups_count = std::max<std::int64_t>(0, std::llround(std::exp(g.normal(pro ? 3.0 : 1.8, 0.8))));
    user.is_pro = g.coin(pro ? 0.5 : 0.15);

    const auto n = static_cast<std::size_t>(g.uniform_int(6, 14));
    // About one user in twelve is too active in the window and gets filtered.
    const bool burst = g.coin(0.08);
    const std::size_t in_window = burst ? (n + 2) / 3 : static_cast<std::size_t>(g.coin(0.5) ? 1 : 0);
    user.total_photos = static_cast<std::int64_t>(n);
    user.photos_in_window = static_cast<std::int64_t>(in_window);

    const auto join_days = (reference - user.join_date).count();
    for (std::size_t p = 0; p < n; ++p) {
      PhotoRecord photo;
      photo.photo_id = id("p", ++photo_seq, 5);
      photo.user_id = user.user_id;
      if (p < in_window) {
        photo.upload_date = window_start + days(g.uniform_int(0, 30));
      } else {
        const auto earliest = std::max<std::int64_t>(0, join_days - 1);
        photo.upload_date = reference - days(g.uniform_int(31, std::max<std::int64_t>(31, earliest)));
        if (photo.upload_date < user.join_date) photo.upload_date = user.join_date;
      }
      photo.last_update_date = std::min(reference, photo.upload_date + days(g.uniform_int(0, 90)));
      photo.groups_count = std::max<std::int64_t>(0, std::llround(g.normal(pro ? 12.0 : 4.0, 3.0)));
      photo.views = std::max<std::int64_t>(0, std::llround(std::exp(g.normal(pro ? 7.0 : 5.2, 1.0))));
      photo.favourites = std::max<std::int64_t>(0, std::llround(static_cast<double>(photo.views) * g.rng.uniform() * 0.05));
      photo.nima_technical = std::clamp(g.normal(pro ? 5.2 : 4.8, 0.45), 1.0, 10.0);
      photo.nima_aesthetic = std::clamp(g.normal(pro ? 4.9 : 4.55, 0.45), 1.0, 10.0);
      photo.kong_score = std::clamp(g.normal(pro ? 0.56 : 0.51, 0.08), 0.0, 1.0);
      // Round to the precision of the released scores.
      photo.nima_technical = std::round(photo.nima_technical * 1e4) / 1e4;
      photo.nima_aesthetic = std::round(photo.nima_aesthetic * 1e4) / 1e4;
      photo.kong_score = std::round(photo.kong_score * 1e4) / 1e4;

      const auto n_comments = static_cast<std::size_t>(g.uniform_int(0, pro ? 5 : 3));
      for (std::size_t c = 0; c < n_comments; ++c)
        comments.push_back({id("c", ++comment_seq, 6), photo.photo_id, g.pick(kComments)});
      photos.push_back(std::move(photo));
    }
    users.push_back(std::move(user));
  }

  write_table(dir / "users.jsonl", users);
  write_table(dir / "photos.jsonl", photos);
  write_table(dir / "comments.jsonl", comments);

  append_lines(dir / "users.jsonl",
               {R"({"user_id":"u9001","occupation":"photographer","total_photos":-5,"join_date":"2015-03-02","following_count":10,"groups_count":2,"is_pro":false,"photos_in_window":0})",
                R"({"user_id":"u9002","occupation":"teacher","total_photos":10,"join_date":"2015-03-02","following_count":10,"groups_count":2,"is_pro":false,"photos_in_window":12})"});
  append_lines(dir / "photos.jsonl",
               {R"({"photo_id":"p90001","user_id":"u0001","upload_date":"2020-01-01","last_update_date":"2020-01-02","groups_count":1,"views":-2,"favourites":0,"nima_technical":5.0,"nima_aesthetic":5.0,"kong_score":0.5})",
                R"({"photo_id":"p90002","user_id":"u0001","upload_date":"2020-01-01","last_update_date":"2020-01-02","groups_count":1,"views":3,"favourites":0,"nima_technical":11.5,"nima_aesthetic":5.0,"kong_score":0.5})",
                R"({"photo_id":"p90003","user_id":"u9999","upload_date":"2020-01-01","last_update_date":"2020-01-02","groups_count":1,"views":3,"favourites":0,"nima_technical":5.0,"nima_aesthetic":5.0,"kong_score":0.5})"});
  append_lines(dir / "comments.jsonl", {R"({"comment_id":"c900001","photo_id":"p99999","raw_text":"orphan"})",
                                        R"({"comment_id":"c900002","photo_id":"p00001"})"});

  write_file(dir / "lenslevel.json", R"({
  "users": "users.jsonl",
  "photos": "photos.jsonl",
  "comments": "comments.jsonl",
  "snapshot": {
    "reference_date": "2021-12-31",
    "window": "2021-12",
    "activity_ratio_cutoff": 0.2,
    "trim_fraction": 0.05
  },
  "seed": 42,
  "k": 10
}
)");
  std::cout << users.size() << " users, " << photos.size() << " photos, " << comments.size() << " comments\n";
  return 0;
}
