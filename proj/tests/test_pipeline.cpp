#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "lenslevel/csv.hpp"
#include "lenslevel/pipeline.hpp"
#include "test_util.hpp"

using namespace lenslevel;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = LENSLEVEL_FIXTURE_DIR;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LENSLEVEL_BIN) + " -q " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<csv::Record> read_csv(const fs::path& p) {
  std::istringstream in(testutil::read_text(p));
  return csv::read_all(in);
}

// One full run on the fixture, shared by the checks below.
const fs::path& fixture_run() {
  static testutil::TempDir dir;
  static bool done = false;
  if (!done) {
    PipelineConfig cfg = PipelineConfig::load(kFixture / "lenslevel.json");
    Pipeline p(cfg, dir / "run");
    p.run_all();
    done = true;
  }
  static const fs::path out = dir / "run";
  return out;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("end to end on the bundled sample") {
    const fs::path& out = fixture_run();
    for (const char* rel : {"ingest/summary.json", "textprep/clean_comments.jsonl", "textfeat/comment_features.jsonl",
                            "label/labels.jsonl", "featurize/all/features.csv", "evaluate/user+photo/random_forest.json",
                            "correlate/correlation.csv", "characterize/characterization.md", "reports/model_grid.md",
                            "reports/feature_groups.csv", "manifest.json", "run_log.json"})
      CHECK_MESSAGE(fs::exists(out / rel), rel);

    const auto manifest = nlohmann::json::parse(testutil::read_text(out / "manifest.json"));
    CHECK(manifest["tool_version"] == std::string(kToolVersion));
    CHECK(manifest["steps"].size() == kSteps.size());
    CHECK(manifest["inputs"].size() == 3);

    const auto summary = nlohmann::json::parse(testutil::read_text(out / "ingest/summary.json"));
    CHECK(summary["users_rejected"] == 2);
    CHECK(summary["photos_rejected"] == 3);
    CHECK(summary["comments_rejected"] == 2);
  }

  TEST_CASE("report grids have the expected shape and bounded metrics") {
    const fs::path& out = fixture_run();
    const auto grid = read_csv(out / "reports/model_grid.csv");
    const auto groups = read_csv(out / "reports/feature_groups.csv");
    CHECK(grid.size() == 29);
    CHECK(groups.size() == 3);
    for (const auto* table : {&grid, &groups}) {
      for (std::size_t r = 1; r < table->size(); ++r) {
        for (std::size_t c = 2; c < 6; ++c) {
          const double v = std::stod((*table)[r].fields.at(c));
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
      }
    }
  }

  TEST_CASE("rerun skips every step and leaves the manifest unchanged") {
    const fs::path& out = fixture_run();
    const std::string before = testutil::read_text(out / "manifest.json");
    Pipeline p(PipelineConfig::load(kFixture / "lenslevel.json"), out);
    for (const auto& o : p.run_all()) CHECK_MESSAGE(o.cached, o.step);
    CHECK(testutil::read_text(out / "manifest.json") == before);
  }

  TEST_CASE("a modified output forces that step and its dependants to rerun") {
    testutil::TempDir dir;
    fs::copy(fixture_run(), dir / "run", fs::copy_options::recursive);
    testutil::write_text(dir / "run/correlate/correlation.csv", "tampered\n");
    Pipeline p(PipelineConfig::load(kFixture / "lenslevel.json"), dir / "run");
    for (const auto& o : p.run_all()) CHECK_MESSAGE(o.cached == (o.step != "correlate"), o.step);
    CHECK(testutil::read_text(dir / "run/correlate/correlation.csv") ==
          testutil::read_text(fixture_run() / "correlate/correlation.csv"));
  }

  TEST_CASE("a downstream step without its inputs asks for the upstream one") {
    testutil::TempDir dir;
    Pipeline p(PipelineConfig::load(kFixture / "lenslevel.json"), dir / "run");
    try {
      p.run_step("featurize");
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("lenslevel") != std::string::npos);
    }
  }

  TEST_CASE("config validation") {
    using nlohmann::json;
    CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"colour": 1})"), "."), ValidationError);
    CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"k": 1})"), "."), ValidationError);
    CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"models": ["svm"]})"), "."), ValidationError);
    CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"snapshot": {"trim_fraction": 0.7}})"), "."),
                    ValidationError);
    const auto cfg = PipelineConfig::from_json(json::parse(R"({"users": "u.jsonl", "seed": 7, "models": ["rf"]})"), "/d");
    CHECK(cfg.users == fs::path("/d/u.jsonl"));
    CHECK(cfg.seed == 7);
    CHECK(cfg.models.size() == 1);
    CHECK(cfg.settings_json().dump().find("u.jsonl") == std::string::npos);
  }

  TEST_CASE("cli exit codes") {
    testutil::TempDir dir;
    const std::string cfg = (kFixture / "lenslevel.json").string();
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("ingest --config " + cfg + " --comments " + (dir / "missing.jsonl").string() + " --out " +
                  (dir / "a").string()) == 2);
    CHECK(run_cli("ingest --config " + cfg + " --out " + (dir / "b").string()) == 0);
    CHECK(fs::exists(dir / "b/ingest/users.jsonl"));
    CHECK(run_cli("featurize --config " + cfg + " --out " + (dir / "b").string()) == 2);
  }

  TEST_CASE("train subcommand reproduces the grid entry") {
    testutil::TempDir dir;
    const fs::path& out = fixture_run();
    const std::string args = "train --config " + (kFixture / "lenslevel.json").string() +
                             " --set user+photo --model random_forest --k 10 --seed 42 --features " +
                             (out / "featurize/user+photo/features.csv").string() + " --labels " +
                             (out / "label/labels.jsonl").string() + " --out " + (dir / "r.json").string();
    REQUIRE(run_cli(args) == 0);
    const auto a = nlohmann::json::parse(testutil::read_text(dir / "r.json"));
    const auto b = nlohmann::json::parse(testutil::read_text(out / "evaluate/user+photo/random_forest.json"));
    CHECK(a["auc"] == b["auc"]);
    CHECK(a["per_fold"] == b["per_fold"]);
  }
}
