// Exercises the installed command surface through real process invocations:
// flag validation, exit codes, output formats.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "helpers.hpp"
#include "pulse/insights.hpp"

namespace {

const std::string kCli = PULSE_CLI_BIN;
const std::string kData = PULSE_DATA_DIR;

using testutil::run_cmd;

// One trained model + bundle shared by the read-only test cases.
struct SharedArtifacts {
  testutil::TempDir tmp;
  std::string model = tmp.file("model.vec");
  std::string bundle = tmp.file("bundle.json");

  SharedArtifacts() {
    auto train = run_cmd(kCli + " embed train --input " + kData +
                         "/synthetic_sentences.txt --out " + model +
                         " --dim 50 --window 5 --negative 5 --epochs 5 --subsample 0" +
                         " --seed 42 --deterministic");
    REQUIRE(train.exit_code == 0);
    auto analyze = run_cmd(kCli + " analyze --input " + kData +
                           "/synthetic_comments.csv --vectors " + model + " --out " +
                           bundle + " --deterministic --seed 42");
    REQUIRE(analyze.exit_code == 0);
  }
};

SharedArtifacts& shared() {
  static SharedArtifacts artifacts;
  return artifacts;
}

}  // namespace

TEST_CASE("embed train is reproducible with --deterministic") {
  testutil::TempDir tmp;
  const auto toy = tmp.file("toy.txt");
  testutil::write_file(toy,
                       "alpha beta gamma delta\n"
                       "beta alpha delta gamma\n"
                       "gamma delta alpha beta\n");
  const std::string base = kCli + " embed train --input " + toy +
                           " --dim 8 --epochs 3 --min-count 1 --seed 42 --deterministic"
                           " --out ";
  const auto r1 = run_cmd(base + tmp.file("a.vec"));
  const auto r2 = run_cmd(base + tmp.file("b.vec"));
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  const auto a = testutil::read_file(tmp.file("a.vec"));
  CHECK(!a.empty());
  CHECK(a == testutil::read_file(tmp.file("b.vec")));
}

TEST_CASE("embed train on a missing input exits 1") {
  testutil::TempDir tmp;
  const auto r = run_cmd(kCli + " embed train --input " + tmp.file("missing.txt") +
                         " --out " + tmp.file("out.vec"));
  CHECK(r.exit_code == 1);
}

TEST_CASE("embed check reports shape on success and exits 2 on malformed files") {
  testutil::TempDir tmp;
  const auto good = tmp.file("good.vec");
  testutil::write_file(good, "2 3\napple 1 0 0\npear 0 1 0\n");
  const auto ok = run_cmd(kCli + " embed check --vectors " + good);
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("2 words") != std::string::npos);
  CHECK(ok.output.find("dim 3") != std::string::npos);

  const auto bad = tmp.file("bad.vec");
  testutil::write_file(bad, "3 3\napple 1 0 0\n");
  const auto fail = run_cmd(kCli + " embed check --vectors " + bad);
  CHECK(fail.exit_code == 2);
  CHECK(fail.output.find("line") != std::string::npos);
}

TEST_CASE("analyze rejects bad flags with exit 2") {
  const auto& art = shared();
  const auto r = run_cmd(kCli + " analyze --input " + kData +
                         "/synthetic_comments.csv --vectors " + art.model +
                         " --out /tmp/ignored.json --threshold 1.5");
  CHECK(r.exit_code == 2);

  const auto missing = run_cmd(kCli + " analyze --input " + kData +
                               "/synthetic_comments.csv --out /tmp/ignored.json");
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("--vectors") != std::string::npos);
}

TEST_CASE("analyze prints a summary and writes the bundle") {
  const auto& art = shared();
  testutil::TempDir tmp;
  const auto out = tmp.file("fresh.json");
  const auto r = run_cmd(kCli + " analyze --input " + kData +
                         "/synthetic_comments.csv --vectors " + art.model + " --out " +
                         out + " --deterministic");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("comments: 60") != std::string::npos);
  CHECK(r.output.find("groups: 3") != std::string::npos);
  CHECK(r.output.find("top tags:") != std::string::npos);
  const auto bundle = pulse::insights::load_bundle(out);
  CHECK(bundle.groups.size() == 3);
}

TEST_CASE("query tag returns the planted comments") {
  const auto& art = shared();
  const auto r = run_cmd(kCli + " query tag feedback --bundle " + art.bundle +
                         " --format json");
  CHECK(r.exit_code == 0);
  const auto hits = nlohmann::json::parse(r.output);
  REQUIRE(hits.size() == 12);
  for (const auto& c : hits) {
    CHECK(c.at("id").get<std::string>().substr(0, 2) == "fb");
  }
}

TEST_CASE("query tag misses politely with exit 0") {
  const auto& art = shared();
  const auto r = run_cmd(kCli + " query tag zzzz --bundle " + art.bundle);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0 comments") != std::string::npos);
  CHECK(r.output.find("zzzz") != std::string::npos);

  // A miss still suggests known tags sharing a prefix.
  const auto near = run_cmd(kCli + " query tag offi --bundle " + art.bundle);
  CHECK(near.exit_code == 0);
  CHECK(near.output.find("near matches") != std::string::npos);
  CHECK(near.output.find("office") != std::string::npos);
}

TEST_CASE("analyze debug exports write scores, edges and groups") {
  const auto& art = shared();
  testutil::TempDir tmp;
  const auto r = run_cmd(kCli + " analyze --input " + kData +
                         "/synthetic_comments.csv --vectors " + art.model + " --out " +
                         tmp.file("b.json") + " --deterministic --scores-csv " +
                         tmp.file("scores.csv") + " --edges-csv " + tmp.file("edges.csv") +
                         " --groups-json " + tmp.file("groups.json"));
  CHECK(r.exit_code == 0);
  const auto scores = testutil::read_file(tmp.file("scores.csv"));
  CHECK(scores.rfind("a,b,score\n", 0) == 0);
  // All 60 comments have vectors: C(60,2) score rows plus the header.
  CHECK(std::count(scores.begin(), scores.end(), '\n') == 60 * 59 / 2 + 1);
  const auto edges = testutil::read_file(tmp.file("edges.csv"));
  CHECK(edges.rfind("a,b,score\n", 0) == 0);
  const auto groups = nlohmann::json::parse(testutil::read_file(tmp.file("groups.json")));
  CHECK(groups.size() == 3);
}

TEST_CASE("query combo matches the planted work-life group") {
  const auto& art = shared();
  const auto r = run_cmd(kCli + " query combo work-life,balance --bundle " + art.bundle +
                         " --format json");
  CHECK(r.exit_code == 0);
  const auto hits = nlohmann::json::parse(r.output);
  REQUIRE(hits.size() == 24);
  for (const auto& c : hits) {
    CHECK(c.at("id").get<std::string>().substr(0, 2) == "wl");
  }
}

TEST_CASE("report combos prints top and bottom rows") {
  const auto& art = shared();
  const auto r = run_cmd(kCli + " report combos --top 3 --bottom 3 --bundle " +
                         art.bundle + " --width 100");
  CHECK(r.exit_code == 0);
  // 3 distinct combinations exist, so top 3 + bottom 3 dedupes to 3 rows.
  CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 3);

  const auto js = run_cmd(kCli + " report combos --top 1 --bottom 1 --bundle " +
                          art.bundle + " --format json");
  const auto rows = nlohmann::json::parse(js.output);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].at("comment_count").get<int>() == 24);
  CHECK(rows[1].at("comment_count").get<int>() == 12);
}

TEST_CASE("report tags json matches the library report") {
  const auto& art = shared();
  const auto r = run_cmd(kCli + " report tags --bundle " + art.bundle + " --format json");
  CHECK(r.exit_code == 0);
  const auto rows = nlohmann::json::parse(r.output);

  const auto bundle = pulse::insights::load_bundle(art.bundle);
  const auto expect = pulse::insights::tag_frequency(bundle);
  REQUIRE(rows.size() == expect.rows.size());
  for (std::size_t i = 0; i < expect.rows.size(); ++i) {
    CHECK(rows[i].at("tag").get<std::string>() == expect.rows[i].tag);
    CHECK(rows[i].at("comment_count").get<std::int64_t>() ==
          expect.rows[i].comment_count);
  }
}

TEST_CASE("report on an empty bundle prints no tags") {
  testutil::TempDir tmp;
  // A valid but groupless bundle: bundle of one excluded comment.
  const auto vec = tmp.file("tiny.vec");
  testutil::write_file(vec, "1 2\nsomething 1 0\n");
  const auto csv = tmp.file("empty_texts.csv");
  testutil::write_file(csv, "id,text\nc1,\n");
  const auto out = tmp.file("empty.json");
  const auto analyze = run_cmd(kCli + " analyze --input " + csv + " --vectors " + vec +
                               " --out " + out + " --deterministic");
  CHECK(analyze.exit_code == 0);
  const auto r = run_cmd(kCli + " report tags --bundle " + out);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("no tags") != std::string::npos);
}

TEST_CASE("PULSE_STOPWORDS overrides the builtin list") {
  testutil::TempDir tmp;
  const auto stops = tmp.file("stops.txt");
  testutil::write_file(stops, "feedback\n");
  const auto vec = tmp.file("mini.vec");
  testutil::write_file(vec, "2 2\nbalance 1 0\nmanager 0 1\n");
  const auto csv = tmp.file("mini.csv");
  testutil::write_file(csv, "id,text\nc1,feedback balance\nc2,feedback manager\n");
  const auto out = tmp.file("mini.json");
  const auto r = run_cmd("PULSE_STOPWORDS=" + stops + " " + kCli + " analyze --input " +
                         csv + " --vectors " + vec + " --out " + out +
                         " --deterministic");
  CHECK(r.exit_code == 0);
  const auto bundle = pulse::insights::load_bundle(out);
  // "feedback" was stopworded away, so it can never be a tag.
  for (const auto& assignment : bundle.tags) {
    for (const auto& tag : assignment.tags) CHECK(tag.term != "feedback");
  }
}

TEST_CASE("unknown flags and missing subcommands exit 2") {
  CHECK(run_cmd(kCli + " analyze --nope").exit_code == 2);
  CHECK(run_cmd(kCli).exit_code == 2);
  CHECK(run_cmd(kCli + " query").exit_code == 2);
}

TEST_CASE("help and version exit 0") {
  CHECK(run_cmd(kCli + " --help").exit_code == 0);
  CHECK(run_cmd(kCli + " analyze --help").exit_code == 0);
  const auto v = run_cmd(kCli + " --version");
  CHECK(v.exit_code == 0);
  CHECK(v.output.find("1.0.0") != std::string::npos);
}
