#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "detaudit/dataset.hpp"
#include "detaudit/injector.hpp"
#include "detaudit/run_config.hpp"
#include "detaudit/score_file.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace detaudit;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() : dir(fs::temp_directory_path() / ("detaudit_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& stdout_file = "", const std::string& stderr_file = "") {
  std::string cmd = std::string("\"") + DETAUDIT_CLI_PATH + "\" " + args;
  cmd += " >" + (stdout_file.empty() ? std::string("/dev/null") : stdout_file);
  cmd += " 2>" + (stderr_file.empty() ? std::string("/dev/null") : stderr_file);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json without_info(json doc) {
  doc.erase("info");
  return doc;
}

}  // namespace

TEST_CASE("end-to-end pipeline through the command line") {
  const Workdir w;
  REQUIRE(run("synthesize --num-images 60 --seed 3 -o " + (w / "clean.json")) == 0);
  REQUIRE(run("inject " + (w / "clean.json") + " --seed 3 --image-fraction 0.3 -o " + (w / "bad.json") + " -m " +
              (w / "manifest.jsonl")) == 0);
  REQUIRE(run("oracle-predict " + (w / "clean.json") + " -o " + (w / "pred.json")) == 0);

  SUBCASE("objectlab on a clean single-class toy scores 1 everywhere") {
    REQUIRE(run("synthesize --num-images 60 --num-classes 1 --seed 3 -o " + (w / "toy.json")) == 0);
    REQUIRE(run("oracle-predict " + (w / "toy.json") + " -o " + (w / "toy_pred.json")) == 0);
    REQUIRE(run("score " + (w / "toy.json") + " " + (w / "toy_pred.json") + " -o " + (w / "s.jsonl") + " --csv " +
                (w / "s.csv")) == 0);
    const ScoreMap scores = parse_score_file(read_text_file(w / "s.jsonl"));
    CHECK(scores.size() == 60);
    for (const auto& [id, s] : scores) CHECK(s == 1.0);
    CHECK(read_text_file(w / "s.csv").rfind("image_id,score,badloc,swap,overlook\n", 0) == 0);
    const std::string text = read_text_file(w / "s.jsonl");
    const json header = json::parse(text.substr(0, text.find('\n')))["header"];
    CHECK(header["tool"] == "detaudit");
    CHECK(header.contains("version"));
    CHECK(header["config"]["scoring"]["tau_up"] == 0.95);
  }
  SUBCASE("every method and the evaluator") {
    for (const char* method : {"objectlab", "map", "tile", "clod"}) {
      CAPTURE(method);
      const std::string out = w / (std::string(method) + ".jsonl");
      REQUIRE(run("score " + (w / "bad.json") + " " + (w / "pred.json") + " --method " + method + " -o " + out) == 0);
      const std::string text = read_text_file(out);
      const std::size_t start = text.find('\n') + 1;
      CHECK(json::parse(text.substr(start, text.find('\n', start) - start))["method"] == method);
      REQUIRE(run("evaluate " + out + " " + (w / "manifest.jsonl") + " --json", w / "report.json") == 0);
      const json report = json::parse(read_text_file(w / "report.json"));
      for (const char* key : {"average_precision", "precision_at_100", "precision_at_T"}) {
        CHECK(report["metrics"].contains(key));
      }
    }
    REQUIRE(run("evaluate " + (w / "objectlab.jsonl") + " " + (w / "manifest.jsonl") + " --json", w / "r.json") == 0);
    CHECK(json::parse(read_text_file(w / "r.json"))["metrics"]["average_precision"].get<double>() >= 0.95);
  }
  SUBCASE("inject is reproducible and seed-sensitive") {
    REQUIRE(run("inject " + (w / "clean.json") + " --seed 3 --image-fraction 0.3 -o " + (w / "bad2.json") + " -m " +
                (w / "manifest2.jsonl")) == 0);
    CHECK(read_text_file(w / "bad.json") == read_text_file(w / "bad2.json"));
    CHECK(read_text_file(w / "manifest.jsonl") == read_text_file(w / "manifest2.jsonl"));
    REQUIRE(run("inject " + (w / "clean.json") + " --seed 4 --image-fraction 0.3 -o " + (w / "bad3.json") + " -m " +
                (w / "manifest3.jsonl")) == 0);
    CHECK(read_text_file(w / "manifest.jsonl") != read_text_file(w / "manifest3.jsonl"));
    const std::string manifest = read_text_file(w / "manifest.jsonl");
    CHECK(json::parse(manifest.substr(0, manifest.find('\n')))["header"]["config"]["seed"] == 3);
    CHECK(json::parse(read_text_file(w / "bad.json"))["info"]["config"]["seed"] == 3);
  }
  SUBCASE("zero fraction leaves the labels untouched") {
    REQUIRE(run("inject " + (w / "clean.json") + " --image-fraction 0 -o " + (w / "same.json") + " -m " +
                (w / "m0.jsonl")) == 0);
    const json in = json::parse(read_text_file(w / "clean.json"));
    const json out = json::parse(read_text_file(w / "same.json"));
    CHECK(without_info(in).dump() == without_info(out).dump());
    CHECK(parse_manifest(read_text_file(w / "m0.jsonl")).flagged_count() == 0);
  }
  SUBCASE("config file, with flags taking precedence") {
    write_text_file(w / "run.toml", "tau-up = 0.97\ntemperature = 0.5\n");
    REQUIRE(run("--config " + (w / "run.toml") + " score " + (w / "clean.json") + " " + (w / "pred.json") + " -o " +
                (w / "c.jsonl")) == 0);
    std::string text = read_text_file(w / "c.jsonl");
    json header = json::parse(text.substr(0, text.find('\n')))["header"];
    CHECK(header["config"]["scoring"]["tau_up"] == 0.97);
    CHECK(header["config"]["scoring"]["softmin_temperature"] == 0.5);
    REQUIRE(run("--config " + (w / "run.toml") + " --tau-up 0.96 score " + (w / "clean.json") + " " +
                (w / "pred.json") + " -o " + (w / "c2.jsonl")) == 0);
    text = read_text_file(w / "c2.jsonl");
    header = json::parse(text.substr(0, text.find('\n')))["header"];
    CHECK(header["config"]["scoring"]["tau_up"] == 0.96);
  }
  SUBCASE("replaying an embedded config reproduces the file") {
    REQUIRE(run("--alpha 0.3 --temperature 0.4 --overlooked-mode literal score " + (w / "bad.json") + " " +
                (w / "pred.json") + " -o " + (w / "r1.jsonl")) == 0);
    REQUIRE(run("--replay " + (w / "r1.jsonl") + " --workers 3 score " + (w / "bad.json") + " " + (w / "pred.json") +
                " -o " + (w / "r2.jsonl")) == 0);
    CHECK(read_text_file(w / "r1.jsonl") == read_text_file(w / "r2.jsonl"));
    REQUIRE(run("--replay " + (w / "bad.json") + " inject " + (w / "clean.json") + " -o " + (w / "bad4.json") +
                " -m " + (w / "manifest4.jsonl")) == 0);
    CHECK(read_text_file(w / "bad.json") == read_text_file(w / "bad4.json"));
    CHECK(read_text_file(w / "manifest.jsonl") == read_text_file(w / "manifest4.jsonl"));
    REQUIRE(run("--replay " + (w / "r1.jsonl") + " --alpha 0.5 score " + (w / "bad.json") + " " + (w / "pred.json") +
                " -o " + (w / "r3.jsonl")) == 0);
    const std::string text = read_text_file(w / "r3.jsonl");
    const json header = json::parse(text.substr(0, text.find('\n')))["header"];
    CHECK(header["config"]["scoring"]["alpha"] == 0.5);
    CHECK(header["config"]["scoring"]["overlooked_mode"] == "literal");
    CHECK(run("--replay " + (w / "pred.json") + "x score " + (w / "bad.json") + " " + (w / "pred.json")) != 0);
    write_text_file(w / "noconfig.json", "[]");
    CHECK(run("--replay " + (w / "noconfig.json") + " score " + (w / "bad.json") + " " + (w / "pred.json")) == 1);
  }
  SUBCASE("validate") {
    CHECK(run("validate " + (w / "clean.json") + " " + (w / "pred.json"), w / "v.json") == 0);
    CHECK(json::parse(read_text_file(w / "v.json"))["valid"] == true);
    write_text_file(w / "broken.json", R"({"images": [{"id": 1, "width": 5, "height": 5}],
      "annotations": [{"image_id": 2, "category_id": 1, "bbox": [0, 0, 0, 1]}], "categories": [{"id": 1}]})");
    CHECK(run("validate " + (w / "broken.json"), w / "v2.json") == 1);
    const json v2 = json::parse(read_text_file(w / "v2.json"));
    CHECK(v2["valid"] == false);
    CHECK(v2["issues"][0]["severity"] == "error");
  }
}

TEST_CASE("run config JSON round trip") {
  RunConfig a;
  a.seed = 17;
  a.scoring.similarity.alpha = 0.25;
  a.scoring.overlooked_mode = OverlookedMode::kLiteral;
  a.map.iou_thresholds = {0.5, 0.75};
  a.inject.allow_empty_images = false;
  a.ingest.clip_boxes = false;
  a.synthetic.num_classes = 3;
  a.apply_seed();
  RunConfig b;
  b.update_from_json(a.to_json());
  CHECK(b.to_json() == a.to_json());
  RunConfig c;
  c.update_from_json(json::object());
  CHECK(c.to_json() == RunConfig{}.to_json());
  CHECK_THROWS_AS(c.update_from_json({{"scoring", {{"alpha", "x"}}}}), ConfigError);
  CHECK_THROWS_AS(c.update_from_json({{"scoring", 3}}), ConfigError);
  CHECK_THROWS_AS(c.update_from_json(json::array()), ConfigError);
}

TEST_CASE("command-line failures exit nonzero") {
  const Workdir w;
  REQUIRE(run("synthesize --num-images 10 -o " + (w / "clean.json")) == 0);
  REQUIRE(run("oracle-predict " + (w / "clean.json") + " -o " + (w / "pred.json")) == 0);
  CHECK(run("score " + (w / "clean.json") + " " + (w / "pred.json") + " --method bogus") != 0);
  CHECK(run("") != 0);
  CHECK(run("score " + (w / "missing.json") + " " + (w / "pred.json")) != 0);
  CHECK(run("--tau-up 0.4 score " + (w / "clean.json") + " " + (w / "pred.json")) == 1);
  CHECK(run("--alpha 2 score " + (w / "clean.json") + " " + (w / "pred.json")) == 1);

  // Bad input produces a machine-readable error list.
  write_text_file(w / "bad_pred.json", R"([{"image_id": 999, "category_id": 1, "bbox": [0,0,1,1], "score": 0.9}])");
  CHECK(run("score " + (w / "clean.json") + " " + (w / "bad_pred.json"), "", w / "err.json") == 1);
  const json err = json::parse(read_text_file(w / "err.json"));
  CHECK(err["errors"][0]["image_id"] == 999);

  // Mismatched id sets between scores and manifest.
  REQUIRE(run("score " + (w / "clean.json") + " " + (w / "pred.json") + " -o " + (w / "s.jsonl")) == 0);
  REQUIRE(run("synthesize --num-images 12 -o " + (w / "other.json")) == 0);
  REQUIRE(run("inject " + (w / "other.json") + " --image-fraction 1 -o " + (w / "o.json") + " -m " + (w / "m.jsonl")) == 0);
  CHECK(run("evaluate " + (w / "s.jsonl") + " " + (w / "m.jsonl")) == 1);

  // Inputs are never overwritten.
  const std::string before = read_text_file(w / "clean.json");
  CHECK(run("oracle-predict " + (w / "clean.json") + " -o " + (w / "clean.json")) == 1);
  CHECK(read_text_file(w / "clean.json") == before);
}
