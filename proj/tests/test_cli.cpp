#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <map>
#include <sstream>

#include "amodal/dataset.hpp"
#include "amodal/png_io.hpp"
#include "amodal/trace_io.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace amodal;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome amodal_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Every file under `root` except run manifests, keyed by relative path.
std::map<std::string, std::string> contents(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      files[fs::relative(e.path(), root).string()] = read_file(e.path());
  return files;
}

json load(const fs::path& p) { return json::parse(read_file(p)); }

std::string str(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("synth is deterministic and honours its options") {
  test::TempDir dir;
  const std::vector<std::string> base = {"synth", "--count", "4", "--seed", "9", "--width", "96",
                                         "--height", "96", "--max-size", "48"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", str(dir / "a")});
  b.insert(b.end(), {"--out", str(dir / "b"), "--jobs", "3"});
  REQUIRE(amodal_cli(a).code == cli::kOk);
  REQUIRE(amodal_cli(b).code == cli::kOk);
  CHECK(contents(dir / "a") == contents(dir / "b"));

  const json manifest = load(dir / "a" / "manifest.json");
  CHECK(manifest["command"] == "synth");
  CHECK(manifest["seed"] == 9);
  CHECK(manifest.contains("version"));
  CHECK(manifest.contains("wall_time_s"));
  CHECK(fs::exists(dir / "a" / "stats.json"));

  const auto records = read_dataset(dir / "a");
  CHECK(records.size() == 4);
  for (const auto& r : records) CHECK(r.scene.size() >= 5);

  REQUIRE(amodal_cli({"synth", "--count", "0", "--out", str(dir / "none")}).code == cli::kOk);
  CHECK(read_dataset(dir / "none").empty());

  REQUIRE(amodal_cli({"synth", "--count", "3", "--min-objects", "7", "--max-objects", "8",
                      "--out", str(dir / "seven")})
              .code == cli::kOk);
  for (const auto& r : read_dataset(dir / "seven")) CHECK(r.scene.size() >= 7);

  const auto bad = amodal_cli({"synth", "--min-objects", "9", "--max-objects", "3", "--out",
                               str(dir / "bad")});
  CHECK(bad.code == cli::kInvalidInput);
  CHECK(!bad.err.empty());
  CHECK(amodal_cli({"synth", "--shapes", "hexagon", "--out", str(dir / "x")}).code ==
        cli::kInvalidInput);
  CHECK(amodal_cli({"synth"}).code == cli::kInvalidInput);
  CHECK(amodal_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("decompose, eval and recompose end to end") {
  test::TempDir dir;
  REQUIRE(amodal_cli({"synth", "--count", "3", "--seed", "2", "--width", "96", "--height", "96",
                      "--max-size", "48", "--out", str(dir / "gt")})
              .code == cli::kOk);

  SUBCASE("oracle decomposition scores perfectly") {
    REQUIRE(amodal_cli({"decompose", "--input", str(dir / "gt"), "--dump-steps", "--out",
                        str(dir / "pred")})
                .code == cli::kOk);
    const auto ev = amodal_cli({"eval", "--gt", str(dir / "gt"), "--pred", str(dir / "pred"),
                                "--baselines", "--out", str(dir / "report")});
    REQUIRE(ev.code == cli::kOk);
    const json report = load(dir / "report" / "report.json");
    CHECK(report["mask_ap"]["AP"] == 1.0);
    CHECK(report["oap"]["OAP50"]["value"] == 1.0);
    CHECK(report["completion"]["background"]["RMSE"] == 0.0);
    REQUIRE(report["baselines"].size() == 4);
    std::vector<std::string> names;
    for (const auto& row : report["baselines"]) names.push_back(row["name"]);
    CHECK(names == std::vector<std::string>{"Area", "Y-axis", "IoU Area", "layer order"});
    CHECK(ev.out.find("Ordering Algorithm") != std::string::npos);
    CHECK(ev.out.find("IoU Area") != std::string::npos);
    CHECK(fs::exists(dir / "report" / "report.txt"));

    // a recompose with no edits reproduces the input image
    write_file(dir / "empty.json", "[]");
    REQUIRE(amodal_cli({"recompose", "--trace", str(dir / "pred" / "scene_000000.json"), "--edits",
                        str(dir / "empty.json"), "--out", str(dir / "same.png")})
                .code == cli::kOk);
    CHECK(read_png(dir / "same.png") == read_png(dir / "gt" / "images" / "scene_000000.png"));
    CHECK(fs::exists(dir / "same.manifest.json"));

    write_file(dir / "bad.json", R"([{"kind": "delete", "target": 77}])");
    const auto bad = amodal_cli({"recompose", "--trace", str(dir / "pred" / "scene_000000.json"),
                                 "--edits", str(dir / "bad.json"), "--out", str(dir / "x.png")});
    CHECK(bad.code == cli::kInvalidInput);
    CHECK(bad.err.find("77") != std::string::npos);
  }

  SUBCASE("engine options reach the manifest") {
    REQUIRE(amodal_cli({"decompose", "--input", str(dir / "gt"), "--max-steps", "1",
                        "--nonocc-threshold", "0.3", "--out", str(dir / "one")})
                .code == cli::kOk);
    const json m = load(dir / "one" / "manifest.json");
    CHECK(m["config"]["engine"]["nonocc_threshold"] == 0.3);
    for (const auto& steps : m["steps_per_scene"]) CHECK(steps == 1);
    const StoredTrace t = read_trace(dir / "one" / "scene_000000.json");
    CHECK(t.decomposition.trace.steps.size() == 1);
  }

  SUBCASE("options from a config file") {
    write_file(dir / "run.ini", "[decompose]\nmax-steps = 2\nnonocc-threshold = 0.3\n");
    REQUIRE(amodal_cli({"--config", str(dir / "run.ini"), "decompose", "--input", str(dir / "gt"),
                        "--out", str(dir / "cfg")})
                .code == cli::kOk);
    const json m = load(dir / "cfg" / "manifest.json");
    CHECK(m["config"]["engine"]["max_steps"] == 2);
    CHECK(m["config"]["engine"]["nonocc_threshold"] == 0.3);
  }

  SUBCASE("invalid components") {
    const auto r = amodal_cli({"decompose", "--input", str(dir / "gt"), "--segmenter", "psychic",
                               "--out", str(dir / "x")});
    CHECK(r.code == cli::kInvalidInput);
    CHECK(r.err.find("psychic") != std::string::npos);
    CHECK(amodal_cli({"decompose", "--input", str(dir / "missing"), "--out", str(dir / "x")}).code ==
          cli::kInvalidInput);
  }

  SUBCASE("decomposition is independent of the job count") {
    REQUIRE(amodal_cli({"decompose", "--input", str(dir / "gt"), "--segmenter", "corrupted",
                        "--mask-erode-px", "1", "--label-flip-prob", "0.3", "--completer", "inpaint",
                        "--out", str(dir / "j1")})
                .code == cli::kOk);
    REQUIRE(amodal_cli({"decompose", "--input", str(dir / "gt"), "--segmenter", "corrupted",
                        "--mask-erode-px", "1", "--label-flip-prob", "0.3", "--completer", "inpaint",
                        "--jobs", "3", "--out", str(dir / "j3")})
                .code == cli::kOk);
    CHECK(contents(dir / "j1") == contents(dir / "j3"));
  }

  SUBCASE("empty predictions") {
    fs::create_directories(dir / "nothing");
    REQUIRE(amodal_cli({"eval", "--gt", str(dir / "gt"), "--pred", str(dir / "nothing"), "--out",
                        str(dir / "r0")})
                .code == cli::kOk);
    const json report = load(dir / "r0" / "report.json");
    CHECK(report["mask_ap"]["AP"] == 0.0);
    CHECK(report["oap"]["OAP"]["value"].is_null());
  }

  SUBCASE("mismatched scene ids are named") {
    REQUIRE(amodal_cli({"decompose", "--input", str(dir / "gt"), "--out", str(dir / "p")}).code ==
            cli::kOk);
    fs::remove(dir / "p" / "scene_000001.json");
    fs::copy_file(dir / "p" / "scene_000002.json", dir / "p" / "scene_000042.json");
    json t = load(dir / "p" / "scene_000042.json");
    t["scene_id"] = 42;
    write_file(dir / "p" / "scene_000042.json", t.dump());
    const auto r = amodal_cli({"eval", "--gt", str(dir / "gt"), "--pred", str(dir / "p"), "--out",
                               str(dir / "r")});
    CHECK(r.code == cli::kInvalidInput);
    CHECK(r.err.find("42") != std::string::npos);
    CHECK(r.err.find("1") != std::string::npos);
  }

  SUBCASE("ground truth scored against itself") {
    REQUIRE(amodal_cli({"eval", "--gt", str(dir / "gt"), "--baselines", "--out", str(dir / "self")})
                .code == cli::kOk);
    const json report = load(dir / "self" / "report.json");
    CHECK(report["source"] == "ground truth");
    CHECK(report["oap"]["OAP"]["value"] == 1.0);
  }
}

TEST_CASE("decompose a single image") {
  test::TempDir dir;
  REQUIRE(amodal_cli({"synth", "--count", "1", "--width", "64", "--height", "64", "--max-size", "32",
                      "--out", str(dir / "gt")})
              .code == cli::kOk);
  const auto png = dir / "gt" / "images" / "scene_000000.png";
  REQUIRE(amodal_cli({"decompose", "--input", str(png), "--segmenter", "heuristic", "--completer",
                      "inpaint", "--out", str(dir / "one")})
              .code == cli::kOk);
  CHECK(fs::exists(dir / "one" / "scene_000000.json"));
  // oracle components need ground truth
  CHECK(amodal_cli({"decompose", "--input", str(png), "--out", str(dir / "two")}).code ==
        cli::kInvalidInput);
}
